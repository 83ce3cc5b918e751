#include "otsim/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace otsim::qsim {

namespace {

// Largest register sizes the two representations will allocate.
constexpr int kMaxSampledQubits = 20;
constexpr int kMaxExactQubits = 12;

void check_qubit_count(int n, bool exact) {
  if (n < 1) throw ValidationError("qubit count must be >= 1");
  const int cap = exact ? kMaxExactQubits : kMaxSampledQubits;
  if (n > cap)
    throw CapacityError("register of " + std::to_string(n) + " qubits exceeds the " +
                        (exact ? std::string("exact") : std::string("sampled")) +
                        "-mode cap of " + std::to_string(cap));
}

void check_sites(std::span<const int> sites, int n) {
  if (sites.empty()) throw ValidationError("empty site list");
  for (std::size_t a = 0; a < sites.size(); ++a) {
    if (sites[a] < 1 || sites[a] > n)
      throw ValidationError("site " + std::to_string(sites[a]) + " out of range 1.." +
                            std::to_string(n));
    for (std::size_t b = a + 1; b < sites.size(); ++b)
      if (sites[a] == sites[b]) throw ValidationError("repeated site in site list");
  }
}

void check_bit(int b, const char* what) {
  if (b != 0 && b != 1) throw ValidationError(std::string(what) + " must be 0 or 1");
}

void append_f64(Bytes& out, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, sizeof(u));
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
}

double read_f64(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= std::uint64_t{in[at + i]} << (8 * i);
  double v;
  std::memcpy(&v, &u, sizeof(v));
  if (!std::isfinite(v)) throw IntegrityError("non-finite value in serialized state");
  return v;
}

// Shared header checks for the two wire formats: tag byte, qubit count within
// the representation's cap, exact payload length.
int check_wire(std::span<const std::uint8_t> wire, char tag, bool exact) {
  if (wire.size() < 2) throw IntegrityError("serialized state too short");
  if (wire[0] != static_cast<std::uint8_t>(tag))
    throw IntegrityError("unexpected serialized-state tag");
  const int n = wire[1];
  if (n < 1 || n > (exact ? kMaxExactQubits : kMaxSampledQubits))
    throw IntegrityError("serialized qubit count out of range");
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t entries = exact ? dim * dim : dim;
  if (wire.size() != 2 + 16 * entries)
    throw IntegrityError("serialized state has wrong length");
  return n;
}

// Index patterns covering the 2^m assignments of the listed sites; the first
// listed site is the most significant bit of the gate-local index.
std::vector<std::uint64_t> site_patterns(std::span<const int> sites, int n) {
  const std::size_t m = sites.size();
  std::vector<std::uint64_t> patterns(std::size_t{1} << m, 0);
  for (std::size_t g = 0; g < patterns.size(); ++g) {
    std::uint64_t p = 0;
    for (std::size_t j = 0; j < m; ++j)
      if ((g >> (m - 1 - j)) & 1) p |= std::uint64_t{1} << (n - sites[j]);
    patterns[g] = p;
  }
  return patterns;
}

ComplexVector apply_gate_to_vector(const ComplexVector& amps, const ComplexMatrix& gate,
                                   std::span<const int> sites, int n) {
  const std::size_t m = sites.size();
  const Eigen::Index gdim = Eigen::Index{1} << m;
  if (gate.rows() != gdim || gate.cols() != gdim)
    throw ValidationError("gate dimension does not match site count");
  const auto patterns = site_patterns(sites, n);
  std::uint64_t target_mask = 0;
  for (int s : sites) target_mask |= std::uint64_t{1} << (n - s);

  ComplexVector out = amps;
  const std::uint64_t dim = std::uint64_t{1} << n;
  ComplexVector sub(gdim), mixed(gdim);
  for (std::uint64_t base = 0; base < dim; ++base) {
    if (base & target_mask) continue;
    for (Eigen::Index g = 0; g < gdim; ++g) sub(g) = amps(static_cast<Eigen::Index>(base | patterns[g]));
    mixed.noalias() = gate * sub;
    for (Eigen::Index g = 0; g < gdim; ++g) out(static_cast<Eigen::Index>(base | patterns[g])) = mixed(g);
  }
  return out;
}

const ComplexMatrix& basis_rotation(Basis basis) {
  static const ComplexMatrix id = ComplexMatrix::Identity(2, 2);
  return basis == Basis::kComputational ? id : hadamard();
}

}  // namespace

const ComplexMatrix& pauli_x() {
  static const ComplexMatrix m = [] {
    ComplexMatrix g(2, 2);
    g << 0, 1, 1, 0;
    return g;
  }();
  return m;
}

const ComplexMatrix& pauli_y() {
  static const ComplexMatrix m = [] {
    ComplexMatrix g(2, 2);
    g << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
    return g;
  }();
  return m;
}

const ComplexMatrix& pauli_z() {
  static const ComplexMatrix m = [] {
    ComplexMatrix g(2, 2);
    g << 1, 0, 0, -1;
    return g;
  }();
  return m;
}

const ComplexMatrix& hadamard() {
  static const ComplexMatrix m = [] {
    ComplexMatrix g(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    g << s, s, s, -s;
    return g;
  }();
  return m;
}

const ComplexMatrix& cnot() {
  static const ComplexMatrix m = [] {
    ComplexMatrix g = ComplexMatrix::Zero(4, 4);
    g(0, 0) = 1;
    g(1, 1) = 1;
    g(2, 3) = 1;
    g(3, 2) = 1;
    return g;
  }();
  return m;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_unitary(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  ComplexMatrix p = m.adjoint() * m;
  return (p - ComplexMatrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

// ---- StateVector ----

StateVector::StateVector(int n_qubits, ComplexVector amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  check_qubit_count(n_qubits_, /*exact=*/false);
  if (amps_.size() != (Eigen::Index{1} << n_qubits_))
    throw ValidationError("amplitude count must be 2^n");
  if (std::abs(amps_.norm() - 1.0) > kAlgebraTol)
    throw ValidationError("state vector is not normalized");
}

StateVector::StateVector(int n_qubits, ComplexVector amplitudes, Unchecked)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {}

StateVector StateVector::computational(int n_qubits, std::uint64_t basis_index) {
  check_qubit_count(n_qubits, /*exact=*/false);
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  if (basis_index >= static_cast<std::uint64_t>(dim))
    throw ValidationError("basis index out of range");
  ComplexVector amps = ComplexVector::Zero(dim);
  amps(static_cast<Eigen::Index>(basis_index)) = 1.0;
  return detail::Make::state(n_qubits, std::move(amps));
}

Bytes StateVector::serialize() const {
  Bytes out;
  out.push_back('S');
  out.push_back(static_cast<std::uint8_t>(n_qubits_));
  for (Eigen::Index i = 0; i < amps_.size(); ++i) {
    append_f64(out, amps_(i).real());
    append_f64(out, amps_(i).imag());
  }
  return out;
}

StateVector StateVector::deserialize(std::span<const std::uint8_t> wire) {
  const int n = check_wire(wire, 'S', /*exact=*/false);
  const Eigen::Index dim = Eigen::Index{1} << n;
  ComplexVector amps(dim);
  std::size_t at = 2;
  for (Eigen::Index i = 0; i < dim; ++i, at += 16)
    amps(i) = Complex(read_f64(wire, at), read_f64(wire, at + 8));
  return StateVector(n, std::move(amps));  // re-validates the norm
}

// ---- DensityMatrix ----

DensityMatrix::DensityMatrix(int n_qubits, ComplexMatrix matrix)
    : n_qubits_(n_qubits), mat_(std::move(matrix)) {
  check_qubit_count(n_qubits_, /*exact=*/true);
  const Eigen::Index dim = Eigen::Index{1} << n_qubits_;
  if (mat_.rows() != dim || mat_.cols() != dim)
    throw ValidationError("density matrix must be 2^n x 2^n");
  if (!is_hermitian(mat_, kAlgebraTol)) throw ValidationError("density matrix not Hermitian");
  if (std::abs(mat_.trace().real() - 1.0) > kAlgebraTol ||
      std::abs(mat_.trace().imag()) > kAlgebraTol)
    throw ValidationError("density matrix trace must be 1");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(mat_, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < kEigenvalueFloor)
    throw ValidationError("density matrix has a negative eigenvalue");
}

DensityMatrix::DensityMatrix(int n_qubits, ComplexMatrix matrix, Unchecked)
    : n_qubits_(n_qubits), mat_(std::move(matrix)) {}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  if (psi.n_qubits() > kMaxExactQubits)
    throw CapacityError("state too large for a density matrix");
  ComplexMatrix m = psi.amplitudes() * psi.amplitudes().adjoint();
  return detail::Make::density(psi.n_qubits(), std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  check_qubit_count(n_qubits, /*exact=*/true);
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  ComplexMatrix m = ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
  return detail::Make::density(n_qubits, std::move(m));
}

Bytes DensityMatrix::serialize() const {
  Bytes out;
  out.push_back('D');
  out.push_back(static_cast<std::uint8_t>(n_qubits_));
  for (Eigen::Index r = 0; r < mat_.rows(); ++r)
    for (Eigen::Index c = 0; c < mat_.cols(); ++c) {
      append_f64(out, mat_(r, c).real());
      append_f64(out, mat_(r, c).imag());
    }
  return out;
}

DensityMatrix DensityMatrix::deserialize(std::span<const std::uint8_t> wire) {
  const int n = check_wire(wire, 'D', /*exact=*/true);
  const Eigen::Index dim = Eigen::Index{1} << n;
  ComplexMatrix mat(dim, dim);
  std::size_t at = 2;
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c, at += 16)
      mat(r, c) = Complex(read_f64(wire, at), read_f64(wire, at + 8));
  return DensityMatrix(n, std::move(mat));  // re-validates the full structure
}

// ---- QuantumRegister ----

QuantumRegister::QuantumRegister(std::variant<StateVector, DensityMatrix> rep)
    : rep_(std::move(rep)) {
  if (n_sites() < 2) throw ValidationError("register needs at least 2 sites");
}

QuantumRegister QuantumRegister::from_state(StateVector psi) {
  return QuantumRegister(std::variant<StateVector, DensityMatrix>(std::move(psi)));
}

QuantumRegister QuantumRegister::from_density(DensityMatrix rho) {
  return QuantumRegister(std::variant<StateVector, DensityMatrix>(std::move(rho)));
}

int QuantumRegister::n_sites() const {
  return is_exact() ? std::get<DensityMatrix>(rep_).n_qubits()
                    : std::get<StateVector>(rep_).n_qubits();
}

const StateVector& QuantumRegister::state() const {
  if (is_exact()) throw ValidationError("register is in exact mode");
  return std::get<StateVector>(rep_);
}

const DensityMatrix& QuantumRegister::density() const {
  if (!is_exact()) throw ValidationError("register is in sampled mode");
  return std::get<DensityMatrix>(rep_);
}

DensityMatrix QuantumRegister::to_density() const {
  return is_exact() ? density() : DensityMatrix::pure(state());
}

Bytes QuantumRegister::serialize() const {
  return is_exact() ? density().serialize() : state().serialize();
}

QuantumRegister QuantumRegister::deserialize(std::span<const std::uint8_t> wire) {
  if (wire.empty()) throw IntegrityError("serialized register is empty");
  if (wire[0] == 'S') return from_state(StateVector::deserialize(wire));
  if (wire[0] == 'D') return from_density(DensityMatrix::deserialize(wire));
  throw IntegrityError("unexpected serialized-state tag");
}

// ---- operations ----

StateVector bell_prepare(int x0, int x1) {
  check_bit(x0, "x0");
  check_bit(x1, "x1");
  StateVector psi = StateVector::computational(2, 0);
  const int first[] = {1};
  const int pair[] = {1, 2};
  psi = apply_gate(psi, hadamard(), first);
  psi = apply_gate(psi, cnot(), pair);
  if (x1) psi = apply_gate(psi, pauli_x(), first);
  if (x0) psi = apply_gate(psi, pauli_z(), first);
  return psi;
}

ComplexMatrix bell_projector(int x0, int x1) {
  const ComplexVector v = bell_prepare(x0, x1).amplitudes();
  return v * v.adjoint();
}

ComplexMatrix embed_gate(const ComplexMatrix& gate, std::span<const int> sites, int n_sites) {
  check_sites(sites, n_sites);
  const std::size_t m = sites.size();
  const Eigen::Index gdim = Eigen::Index{1} << m;
  if (gate.rows() != gdim || gate.cols() != gdim)
    throw ValidationError("operator dimension does not match site count");
  if (n_sites > kMaxExactQubits) throw CapacityError("embedding dimension too large");
  const auto patterns = site_patterns(sites, n_sites);
  std::uint64_t target_mask = 0;
  for (int s : sites) target_mask |= std::uint64_t{1} << (n_sites - s);

  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const std::uint64_t rest = static_cast<std::uint64_t>(i) & ~target_mask;
    std::uint64_t gi = 0;
    for (std::size_t j = 0; j < m; ++j)
      gi = (gi << 1) | ((static_cast<std::uint64_t>(i) >> (n_sites - sites[j])) & 1);
    for (Eigen::Index gj = 0; gj < gdim; ++gj)
      out(i, static_cast<Eigen::Index>(rest | patterns[gj])) = gate(static_cast<Eigen::Index>(gi), gj);
  }
  return out;
}

StateVector apply_gate(const StateVector& psi, const ComplexMatrix& gate,
                       std::span<const int> sites) {
  check_sites(sites, psi.n_qubits());
  if (!is_unitary(gate, kAlgebraTol)) throw ValidationError("gate is not unitary");
  ComplexVector out = apply_gate_to_vector(psi.amplitudes(), gate, sites, psi.n_qubits());
  return detail::Make::state(psi.n_qubits(), std::move(out));
}

DensityMatrix apply_gate(const DensityMatrix& rho, const ComplexMatrix& gate,
                         std::span<const int> sites) {
  check_sites(sites, rho.n_qubits());
  if (!is_unitary(gate, kAlgebraTol)) throw ValidationError("gate is not unitary");
  const int n = rho.n_qubits();
  // rho -> U rho U+ column-by-column, then row-by-row via the adjoint trick.
  ComplexMatrix b = rho.matrix();
  for (Eigen::Index c = 0; c < b.cols(); ++c)
    b.col(c) = apply_gate_to_vector(b.col(c), gate, sites, n);
  ComplexMatrix bt = b.adjoint();
  for (Eigen::Index c = 0; c < bt.cols(); ++c)
    bt.col(c) = apply_gate_to_vector(bt.col(c), gate, sites, n);
  ComplexMatrix out = bt.adjoint();
  return detail::Make::density(n, std::move(out));
}

QuantumRegister apply_gate(const QuantumRegister& reg, const ComplexMatrix& gate,
                           std::span<const int> sites) {
  if (reg.is_exact()) return QuantumRegister::from_density(apply_gate(reg.density(), gate, sites));
  return QuantumRegister::from_state(apply_gate(reg.state(), gate, sites));
}

MeasurementResult measure_site(QuantumRegister& reg, int site, Basis basis, Rng& rng) {
  const int n = reg.n_sites();
  const int one_site[] = {site};
  check_sites(one_site, n);

  if (!reg.is_exact()) {
    StateVector psi = reg.state();
    if (basis == Basis::kDiagonal) psi = apply_gate(psi, hadamard(), one_site);
    const ComplexVector& amps = psi.amplitudes();
    const std::uint64_t mask = std::uint64_t{1} << (n - site);
    double p1 = 0.0;
    for (Eigen::Index i = 0; i < amps.size(); ++i)
      if (static_cast<std::uint64_t>(i) & mask) p1 += std::norm(amps(i));
    const double p0 = 1.0 - p1;
    int outcome = rng.real() < p0 ? 0 : 1;
    // Guard against collapsing onto a numerically empty branch.
    if ((outcome == 0 ? p0 : p1) < kBranchEps) outcome ^= 1;
    const double p = outcome == 0 ? p0 : p1;
    ComplexVector post = amps;
    const double scale = 1.0 / std::sqrt(p);
    for (Eigen::Index i = 0; i < post.size(); ++i) {
      const bool bit = (static_cast<std::uint64_t>(i) & mask) != 0;
      post(i) = (bit == (outcome == 1)) ? post(i) * scale : Complex(0, 0);
    }
    StateVector collapsed = detail::Make::state(n, std::move(post));
    if (basis == Basis::kDiagonal) collapsed = apply_gate(collapsed, hadamard(), one_site);
    reg = QuantumRegister::from_state(std::move(collapsed));
    return {outcome, p};
  }

  auto branches = measure_site_branches(reg.density(), site, basis);
  const double p0 = branches[0].probability;
  int outcome = rng.real() < p0 ? 0 : 1;
  // Guard against collapsing onto a numerically empty branch.
  if (branches[outcome].impossible) outcome ^= 1;
  const auto& branch = branches[outcome];
  if (branch.impossible) throw Error("measurement found no branch with positive probability");
  reg = QuantumRegister::from_density(*branch.post);
  return {outcome, branch.probability};
}

std::array<MeasurementBranch, 2> measure_site_branches(const DensityMatrix& rho, int site,
                                                       Basis basis) {
  const int n = rho.n_qubits();
  const int one_site[] = {site};
  check_sites(one_site, n);
  const ComplexMatrix& rot = basis_rotation(basis);

  std::array<MeasurementBranch, 2> out{};
  for (int b = 0; b < 2; ++b) {
    ComplexMatrix ket = ComplexMatrix::Zero(2, 1);
    ket(b, 0) = 1.0;
    ComplexMatrix proj1 = rot * ket;
    ComplexMatrix proj = embed_gate(proj1 * proj1.adjoint(), one_site, n);
    ComplexMatrix collapsed = proj * rho.matrix() * proj;
    const double p = collapsed.trace().real();
    MeasurementBranch& branch = out[b];
    branch.outcome = b;
    branch.probability = p;
    branch.impossible = p < kBranchEps;
    if (!branch.impossible)
      branch.post = detail::Make::density(n, collapsed / p);
  }
  return out;
}

DensityMatrix depolarize(const DensityMatrix& rho, double r) {
  if (r < 0.0 || r > 1.0) throw ValidationError("depolarizing rate must be in [0,1]");
  const Eigen::Index dim = rho.dim();
  ComplexMatrix out = r * rho.matrix() +
                      (1.0 - r) * ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim);
  return detail::Make::density(rho.n_qubits(), std::move(out));
}

DensityMatrix depolarize_site(const DensityMatrix& rho, int site, double r) {
  if (r < 0.0 || r > 1.0) throw ValidationError("depolarizing rate must be in [0,1]");
  const int one_site[] = {site};
  check_sites(one_site, rho.n_qubits());
  // Averaging over the four Paulis on one cell leaves I/2 there.
  ComplexMatrix twirl = rho.matrix();
  for (const ComplexMatrix* p : {&pauli_x(), &pauli_y(), &pauli_z()})
    twirl += apply_gate(rho, *p, one_site).matrix();
  ComplexMatrix out = r * rho.matrix() + (1.0 - r) * 0.25 * twirl;
  return detail::Make::density(rho.n_qubits(), std::move(out));
}

StateVector depolarize_site_sampled(const StateVector& psi, int site, double r, Rng& rng) {
  if (r < 0.0 || r > 1.0) throw ValidationError("depolarizing rate must be in [0,1]");
  const int one_site[] = {site};
  check_sites(one_site, psi.n_qubits());
  if (r == 1.0) return psi;  // identity channel: consume no randomness
  if (rng.real() < r) return psi;
  switch (rng.index(4)) {
    case 0: return psi;
    case 1: return apply_gate(psi, pauli_x(), one_site);
    case 2: return apply_gate(psi, pauli_y(), one_site);
    default: return apply_gate(psi, pauli_z(), one_site);
  }
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep_sites) {
  const int n = rho.n_qubits();
  check_sites(keep_sites, n);
  for (std::size_t i = 1; i < keep_sites.size(); ++i)
    if (keep_sites[i] <= keep_sites[i - 1])
      throw ValidationError("keep list must be strictly increasing");
  const int k = static_cast<int>(keep_sites.size());
  const int t = n - k;
  std::vector<int> traced;
  for (int s = 1; s <= n; ++s)
    if (std::find(keep_sites.begin(), keep_sites.end(), s) == keep_sites.end())
      traced.push_back(s);

  auto compose = [&](std::uint64_t keep_bits, std::uint64_t trace_bits) {
    std::uint64_t idx = 0;
    for (int j = 0; j < k; ++j)
      if ((keep_bits >> (k - 1 - j)) & 1) idx |= std::uint64_t{1} << (n - keep_sites[j]);
    for (int j = 0; j < t; ++j)
      if ((trace_bits >> (t - 1 - j)) & 1) idx |= std::uint64_t{1} << (n - traced[j]);
    return static_cast<Eigen::Index>(idx);
  };

  const Eigen::Index out_dim = Eigen::Index{1} << k;
  const std::uint64_t trace_dim = std::uint64_t{1} << t;
  ComplexMatrix out = ComplexMatrix::Zero(out_dim, out_dim);
  for (Eigen::Index i = 0; i < out_dim; ++i)
    for (Eigen::Index j = 0; j < out_dim; ++j) {
      Complex sum(0, 0);
      for (std::uint64_t tr = 0; tr < trace_dim; ++tr)
        sum += rho.matrix()(compose(i, tr), compose(j, tr));
      out(i, j) = sum;
    }
  return detail::Make::density(k, std::move(out));
}

DensityMatrix bell_pair_density(int n_sites, int k, int l, int x0, int x1) {
  if (n_sites < 2) throw ValidationError("register needs at least 2 sites");
  if (!(1 <= k && k < l && l <= n_sites)) throw ValidationError("need 1 <= k < l <= N");
  check_bit(x0, "x0");
  check_bit(x1, "x1");
  check_qubit_count(n_sites, /*exact=*/true);
  const int pair[] = {k, l};
  ComplexMatrix proj = embed_gate(bell_projector(x0, x1), pair, n_sites);
  const double rest = std::pow(2.0, n_sites - 2);
  ComplexMatrix out = proj / rest;
  return detail::Make::density(n_sites, std::move(out));
}

StateVector prepare_register_state(int n_sites, int k, int l, int x0, int x1,
                                   std::span<const int> decoys) {
  if (n_sites < 2) throw ValidationError("register needs at least 2 sites");
  if (!(1 <= k && k < l && l <= n_sites)) throw ValidationError("need 1 <= k < l <= N");
  check_bit(x0, "x0");
  check_bit(x1, "x1");
  if (static_cast<int>(decoys.size()) != n_sites - 2)
    throw ValidationError("need one decoy bit per non-pair site");

  std::uint64_t basis_index = 0;
  std::size_t d = 0;
  for (int s = 1; s <= n_sites; ++s) {
    if (s == k || s == l) continue;
    check_bit(decoys[d], "decoy bit");
    if (decoys[d]) basis_index |= std::uint64_t{1} << (n_sites - s);
    ++d;
  }
  StateVector psi = StateVector::computational(n_sites, basis_index);
  const int first[] = {k};
  const int pair[] = {k, l};
  psi = apply_gate(psi, hadamard(), first);
  psi = apply_gate(psi, cnot(), pair);
  if (x1) psi = apply_gate(psi, pauli_x(), first);
  if (x0) psi = apply_gate(psi, pauli_z(), first);
  return psi;
}

QuantumRegister prepare_register(int n_sites, int k, int l, int x0, int x1, Rng& rng) {
  std::vector<int> decoys(static_cast<std::size_t>(std::max(0, n_sites - 2)));
  for (int& b : decoys) b = rng.bit();
  return QuantumRegister::from_state(prepare_register_state(n_sites, k, l, x0, x1, decoys));
}

QuantumRegister prepare_register_exact(int n_sites, int k, int l, int x0, int x1) {
  return QuantumRegister::from_density(bell_pair_density(n_sites, k, l, x0, x1));
}

}  // namespace otsim::qsim
