#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "otsim/bytes.hpp"
#include "otsim/errors.hpp"
#include "otsim/rng.hpp"

namespace otsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

namespace qsim {

// Numeric tolerances used by structural checks throughout the library.
inline constexpr double kAlgebraTol = 1e-12;   // unitarity, hermiticity, norms
inline constexpr double kEigenvalueFloor = -1e-10;
inline constexpr double kBranchEps = 1e-12;    // below this a branch is impossible

enum class Basis { kComputational, kDiagonal };

namespace detail {
struct Make;  // internal factory bypassing re-validation of derived states
}

// Single-qubit gates and the two-qubit CNOT (first listed site is control).
const ComplexMatrix& pauli_x();
const ComplexMatrix& pauli_y();
const ComplexMatrix& pauli_z();
const ComplexMatrix& hadamard();
const ComplexMatrix& cnot();

bool is_hermitian(const ComplexMatrix& m, double tol = kAlgebraTol);
bool is_unitary(const ComplexMatrix& m, double tol = kAlgebraTol);

// Pure state on n qubits.  Site numbering is 1-based and site 1 maps to the
// most significant bit of the amplitude index, so |q1 q2 ... qN> reads left
// to right.
class StateVector {
 public:
  StateVector(int n_qubits, ComplexVector amplitudes);  // validates norm
  static StateVector computational(int n_qubits, std::uint64_t basis_index);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return amps_.size(); }
  const ComplexVector& amplitudes() const { return amps_; }

  Bytes serialize() const;
  static StateVector deserialize(std::span<const std::uint8_t> wire);

 private:
  friend struct detail::Make;
  struct Unchecked {};
  StateVector(int n_qubits, ComplexVector amplitudes, Unchecked);

  int n_qubits_;
  ComplexVector amps_;
};

// Mixed state on n qubits; Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  DensityMatrix(int n_qubits, ComplexMatrix matrix);  // full validation
  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(int n_qubits);

  int n_qubits() const { return n_qubits_; }
  Eigen::Index dim() const { return mat_.rows(); }
  const ComplexMatrix& matrix() const { return mat_; }

  Bytes serialize() const;
  static DensityMatrix deserialize(std::span<const std::uint8_t> wire);

 private:
  friend struct detail::Make;
  struct Unchecked {};
  DensityMatrix(int n_qubits, ComplexMatrix matrix, Unchecked);

  int n_qubits_;
  ComplexMatrix mat_;
};

namespace detail {
struct Make {
  static StateVector state(int n_qubits, ComplexVector amps) {
    return StateVector(n_qubits, std::move(amps), StateVector::Unchecked{});
  }
  static DensityMatrix density(int n_qubits, ComplexMatrix mat) {
    return DensityMatrix(n_qubits, std::move(mat), DensityMatrix::Unchecked{});
  }
};
}  // namespace detail

// A register of N >= 2 qubit cells, either tracked as a sampled pure state
// or exactly as a density matrix.
class QuantumRegister {
 public:
  static QuantumRegister from_state(StateVector psi);
  static QuantumRegister from_density(DensityMatrix rho);

  int n_sites() const;
  bool is_exact() const { return std::holds_alternative<DensityMatrix>(rep_); }
  const StateVector& state() const;      // throws if exact
  const DensityMatrix& density() const;  // throws if sampled
  DensityMatrix to_density() const;

  Bytes serialize() const;
  // Rebuilds either representation from the tag byte; full re-validation.
  static QuantumRegister deserialize(std::span<const std::uint8_t> wire);

 private:
  explicit QuantumRegister(std::variant<StateVector, DensityMatrix> rep);
  std::variant<StateVector, DensityMatrix> rep_;
};

// ---- operations ----

// Two-qubit graph state (|0 x1> + (-1)^x0 |1 ~x1>)/sqrt(2), built by the
// H, CNOT, Z^x0 X^x1 circuit.
StateVector bell_prepare(int x0, int x1);

// 4x4 projector |B(x0,x1)><B(x0,x1)|.
ComplexMatrix bell_projector(int x0, int x1);

// Dense 2^n x 2^n embedding of a gate acting on the listed sites.  The first
// listed site is the most significant bit of the gate's own index space.
ComplexMatrix embed_gate(const ComplexMatrix& gate, std::span<const int> sites, int n_sites);

StateVector apply_gate(const StateVector& psi, const ComplexMatrix& gate,
                       std::span<const int> sites);
DensityMatrix apply_gate(const DensityMatrix& rho, const ComplexMatrix& gate,
                         std::span<const int> sites);
QuantumRegister apply_gate(const QuantumRegister& reg, const ComplexMatrix& gate,
                           std::span<const int> sites);

struct MeasurementResult {
  int outcome;
  double probability;  // probability of the observed outcome
};

// Destructive single-site measurement; the register collapses in place.
MeasurementResult measure_site(QuantumRegister& reg, int site, Basis basis, Rng& rng);

struct MeasurementBranch {
  int outcome;
  double probability;
  bool impossible;  // probability below kBranchEps; post is absent
  std::optional<DensityMatrix> post;
};

// Exact branch enumeration of a single-site measurement.
std::array<MeasurementBranch, 2> measure_site_branches(const DensityMatrix& rho, int site,
                                                       Basis basis);

// Whole-register depolarizing channel rho -> r rho + (1-r) I/d.
DensityMatrix depolarize(const DensityMatrix& rho, double r);
// Same channel restricted to one cell.
DensityMatrix depolarize_site(const DensityMatrix& rho, int site, double r);
// Mixture-sampled one-cell channel for pure-state runs: with probability
// 1-r applies a uniformly random Pauli (I, X, Y or Z) to the cell.
StateVector depolarize_site_sampled(const StateVector& psi, int site, double r, Rng& rng);

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep_sites);

// Bell pair on sites (k,l) of an n-site register with the remaining cells
// maximally mixed: the exact-mode register state.
DensityMatrix bell_pair_density(int n_sites, int k, int l, int x0, int x1);

// Sampled-mode register: Bell pair on (k,l), every other cell |decoy_i>.
// decoys holds one bit per non-pair site in ascending site order.
StateVector prepare_register_state(int n_sites, int k, int l, int x0, int x1,
                                   std::span<const int> decoys);

QuantumRegister prepare_register(int n_sites, int k, int l, int x0, int x1, Rng& rng);
QuantumRegister prepare_register_exact(int n_sites, int k, int l, int x0, int x1);

}  // namespace qsim
}  // namespace otsim
