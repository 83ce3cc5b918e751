#include "otsim/noise.hpp"

#include <algorithm>
#include <cmath>

namespace otsim::noise {

void NqsmModel::validate() const {
  if (rate < 0.0 || rate > 1.0) throw ValidationError("storage rate must be in [0,1]");
  if (tau_ticks < 0) throw ValidationError("tau_ticks must be non-negative");
}

long ticks_to_decoherence(double rate, double sigma) {
  if (rate < 0.0 || rate > 1.0) throw ValidationError("storage rate must be in [0,1]");
  const double threshold = std::pow(2.0, -sigma);
  if (1.0 <= threshold) return 0;
  if (rate == 1.0)
    throw ValidationError("noiseless storage never reaches the decoherence threshold");
  if (rate == 0.0) return 1;
  long t = static_cast<long>(std::ceil(sigma * std::log(2.0) / -std::log(rate)));
  t = std::max<long>(t, 0);
  while (std::pow(rate, static_cast<double>(t)) > threshold) ++t;
  while (t > 0 && std::pow(rate, static_cast<double>(t - 1)) <= threshold) --t;
  return t;
}

void BqsmModel::validate() const {
  if (memory_bound < 0) throw ValidationError("memory bound must be non-negative");
  if (bound_tick < 0) throw ValidationError("bound tick must be non-negative");
}

double storage_success_bound(const StorageBoundParams& params) {
  if (params.n_cells < 1) throw ValidationError("need at least one cell");
  if (!params.gamma) throw ValidationError("decay exponent function not supplied");
  const double g = params.gamma(params.rate);
  if (g <= 0.0) throw ValidationError("decay exponent must be positive");
  return std::pow(2.0, -static_cast<double>(params.n_cells) * g);
}

DensityMatrix advance_storage(const DensityMatrix& rho, long ticks, const NqsmModel& model) {
  model.validate();
  if (ticks < 0) throw ValidationError("ticks must be non-negative");
  if (ticks == 0) return rho;
  const double r = std::pow(model.rate, static_cast<double>(ticks));
  DensityMatrix out = rho;
  for (int s = 1; s <= rho.n_qubits(); ++s) out = qsim::depolarize_site(out, s, r);
  return out;
}

StateVector advance_storage_sampled(const StateVector& psi, long ticks, const NqsmModel& model,
                                    Rng& rng) {
  model.validate();
  if (ticks < 0) throw ValidationError("ticks must be non-negative");
  if (ticks == 0) return psi;
  const double r = std::pow(model.rate, static_cast<double>(ticks));
  StateVector out = psi;
  for (int s = 1; s <= psi.n_qubits(); ++s) out = qsim::depolarize_site_sampled(out, s, r, rng);
  return out;
}

QuantumRegister advance_storage(const QuantumRegister& reg, long ticks, const NqsmModel& model,
                                Rng& rng) {
  if (reg.is_exact())
    return QuantumRegister::from_density(advance_storage(reg.density(), ticks, model));
  return QuantumRegister::from_state(advance_storage_sampled(reg.state(), ticks, model, rng));
}

MemoryBoundResult apply_memory_bound(QuantumRegister reg, std::span<const int> selection,
                                     const BqsmModel& model, Rng& rng) {
  model.validate();
  const int n = reg.n_sites();
  if (static_cast<int>(selection.size()) > model.memory_bound)
    throw ProtocolError("selection exceeds the memory bound");
  std::vector<int> kept(selection.begin(), selection.end());
  std::sort(kept.begin(), kept.end());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (kept[i] < 1 || kept[i] > n) throw ValidationError("selected site out of range");
    if (i > 0 && kept[i] == kept[i - 1]) throw ValidationError("repeated site in selection");
  }

  MemoryBoundResult result{std::move(kept), {}, std::move(reg)};
  for (int s = 1; s <= n; ++s) {
    if (std::binary_search(result.kept_sites.begin(), result.kept_sites.end(), s)) continue;
    const auto m = qsim::measure_site(result.post, s, qsim::Basis::kComputational, rng);
    result.forced.emplace_back(s, m.outcome);
  }
  return result;
}

SurvivalProbability bqsm_survival_probability(int n_sites, int memory_bound) {
  if (n_sites < 2) throw ValidationError("need at least 2 sites");
  if (memory_bound > n_sites) throw ValidationError("memory bound exceeds register size");
  const double n = n_sites;
  const double m = memory_bound;
  SurvivalProbability out{};
  out.displayed = 2.0 * (m / n) * ((m - 1.0) / (n - 1.0));
  out.enumeration = memory_bound < 2 ? 0.0 : m * (m - 1.0) / (n * (n - 1.0));
  return out;
}

std::vector<int> uniform_subset(int n, int m, Rng& rng) {
  if (m < 0 || m > n) throw ValidationError("subset size out of range");
  // Partial Fisher-Yates over site labels.
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i + 1;
  for (int i = 0; i < m; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.index(static_cast<std::uint64_t>(n - i));
    std::swap(labels[static_cast<std::size_t>(i)], labels[j]);
  }
  std::vector<int> out(labels.begin(), labels.begin() + m);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace otsim::noise
