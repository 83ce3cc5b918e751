#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "otsim/qsim.hpp"
#include "otsim/rng.hpp"

namespace otsim::noise {

using qsim::DensityMatrix;
using qsim::QuantumRegister;
using qsim::StateVector;

// Storage decoherence: every stored cell independently passes through the
// depolarizing channel with retention rate^ticks.
struct NqsmModel {
  double rate = 1.0;      // per-cell retention per tick
  long tau_ticks = 0;     // declared time to (near-)total decoherence

  void validate() const;
};

// Smallest tick count t with rate^t <= 2^(-sigma).
long ticks_to_decoherence(double rate, double sigma);

// Storage truncation: at the bound tick all but memory_bound cells are
// forcibly measured.
struct BqsmModel {
  int memory_bound = 0;
  long bound_tick = 0;

  void validate() const;
};

struct StorageBoundParams {
  int n_cells = 0;
  double rate = 1.0;
  // Channel-specific decay exponent.  There is no canonical instantiation,
  // so callers supply their own.
  std::function<double(double)> gamma;
};

// 2^(-N gamma(R)): the exponential-decay shape of the storage success bound.
double storage_success_bound(const StorageBoundParams& params);

DensityMatrix advance_storage(const DensityMatrix& rho, long ticks, const NqsmModel& model);
StateVector advance_storage_sampled(const StateVector& psi, long ticks, const NqsmModel& model,
                                    Rng& rng);
QuantumRegister advance_storage(const QuantumRegister& reg, long ticks, const NqsmModel& model,
                                Rng& rng);

struct MemoryBoundResult {
  std::vector<int> kept_sites;                    // retained coherently
  std::vector<std::pair<int, int>> forced;        // (site, outcome), ascending site
  QuantumRegister post;
};

// Measures every site outside `selection` in the computational basis.
// Keeping fewer than memory_bound sites is allowed; more is a model violation.
MemoryBoundResult apply_memory_bound(QuantumRegister reg, std::span<const int> selection,
                                     const BqsmModel& model, Rng& rng);

struct SurvivalProbability {
  double enumeration;  // C(M,2)/C(N,2) from exhaustive subset counting
  double displayed;    // 2 (M/N) ((M-1)/(N-1)), reported for comparison
};

// Probability that a uniformly chosen M-subset of the N cells contains a
// designated pair of cells.  Returns 0 when M < 2.
SurvivalProbability bqsm_survival_probability(int n_sites, int memory_bound);

// Uniformly random size-m subset of {1..n}, ascending.
std::vector<int> uniform_subset(int n, int m, Rng& rng);

}  // namespace otsim::noise
