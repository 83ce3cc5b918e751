#include "otsim/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace otsim::spectra {

namespace {

constexpr double kTraceTol = 1e-8;
constexpr double kHermTol = 1e-10;
constexpr double kChainSlack = 1e-9;

void check_n(int n_sites) {
  if (n_sites < 2) throw ValidationError("need at least 2 sites");
}

Eigen::SelfAdjointEigenSolver<ComplexMatrix> solve(const ComplexMatrix& m) {
  if (!qsim::is_hermitian(m, kHermTol))
    throw ValidationError("matrix is not Hermitian within 1e-10");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(m);
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition failed");
  return solver;
}

// sigma_m for one explicit label list, bypassing SigmaState validation cost
// during bulk enumeration.
ComplexMatrix sigma_matrix(const IndexEncodingSet& set, const std::vector<BellLabel>& labels) {
  const int n = set.n_sites();
  const Eigen::Index dim = Eigen::Index{1} << n;
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (std::size_t p = 0; p < set.size(); ++p) {
    const SitePair pair = set.pairs()[p];
    const BellLabel label = labels[p];
    const int sites[] = {pair.k, pair.l};
    sum += qsim::embed_gate(qsim::bell_projector(label.x0, label.x1), sites, n);
  }
  return sum;
}

struct EnumerationResult {
  double trace_root = 0;        // Tr[(sum_m sigma_m^alpha)^{1/alpha}]
  double lmax_a_alpha = 0;      // largest eigenvalue of the accumulated sum
  double sum_lmax_pow = 0;      // sum_m lambda_max(sigma_m)^alpha
  double lmax_mstar = 0;        // max_m lambda_max(sigma_m)
};

EnumerationResult enumerate_encodings(int n_sites, double alpha) {
  check_n(n_sites);
  if (n_sites > kEnumerationCap)
    throw CapacityError("encoding enumeration capped at " + std::to_string(kEnumerationCap) +
                        " sites");
  if (alpha <= 1.0) throw ValidationError("alpha must exceed 1");

  const IndexEncodingSet set(n_sites);
  const std::size_t n_pairs = set.size();
  const Eigen::Index dim = Eigen::Index{1} << n_sites;

  // Cache the 4 embedded projectors per pair.
  std::vector<std::array<ComplexMatrix, 4>> projectors(n_pairs);
  for (std::size_t p = 0; p < n_pairs; ++p) {
    const SitePair pair = set.pairs()[p];
    const int sites[] = {pair.k, pair.l};
    for (int code = 0; code < 4; ++code)
      projectors[p][code] = qsim::embed_gate(qsim::bell_projector(code >> 1, code & 1), sites,
                                             n_sites);
  }

  EnumerationResult result;
  ComplexMatrix a_alpha = ComplexMatrix::Zero(dim, dim);
  ComplexMatrix sigma(dim, dim);
  const std::uint64_t total = std::uint64_t{1} << (2 * n_pairs);
  for (std::uint64_t e = 0; e < total; ++e) {
    sigma.setZero();
    for (std::size_t p = 0; p < n_pairs; ++p)
      sigma += projectors[p][(e >> (2 * p)) & 3];

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sigma);
    if (solver.info() != Eigen::Success) throw Error("eigendecomposition failed");
    Eigen::VectorXd evals = solver.eigenvalues().cwiseMax(0.0);
    const double lmax = evals.maxCoeff();
    result.lmax_mstar = std::max(result.lmax_mstar, lmax);
    result.sum_lmax_pow += std::pow(lmax, alpha);

    Eigen::VectorXd powered = evals.unaryExpr([&](double v) { return std::pow(v, alpha); });
    a_alpha += solver.eigenvectors() * powered.asDiagonal() *
               solver.eigenvectors().adjoint();
  }

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> accum(a_alpha);
  if (accum.info() != Eigen::Success) throw Error("eigendecomposition failed");
  Eigen::VectorXd evals = accum.eigenvalues().cwiseMax(0.0);
  result.lmax_a_alpha = evals.maxCoeff();
  result.trace_root =
      evals.unaryExpr([&](double v) { return std::pow(v, 1.0 / alpha); }).sum();
  return result;
}

}  // namespace

IndexEncodingSet::IndexEncodingSet(int n_sites) : n_(n_sites) {
  check_n(n_sites);
  for (int k = 1; k <= n_sites; ++k)
    for (int l = k + 1; l <= n_sites; ++l) pairs_.push_back({k, l});
}

std::size_t IndexEncodingSet::position(SitePair pair) const {
  const auto it = std::find(pairs_.begin(), pairs_.end(), pair);
  if (it == pairs_.end()) throw ValidationError("pair not in index set");
  return static_cast<std::size_t>(it - pairs_.begin());
}

MessageEncodingVector::MessageEncodingVector(int n_sites, std::vector<BellLabel> labels)
    : index_set_(n_sites), labels_(std::move(labels)) {
  if (labels_.size() != index_set_.size())
    throw ValidationError("encoding must assign a message to every pair");
  for (const BellLabel& label : labels_)
    if ((label.x0 & ~1) || (label.x1 & ~1))
      throw ValidationError("encoding entries must be bit pairs");
}

MessageEncodingVector MessageEncodingVector::constant(int n_sites, BellLabel label) {
  IndexEncodingSet set(n_sites);
  return MessageEncodingVector(n_sites, std::vector<BellLabel>(set.size(), label));
}

MessageEncodingVector MessageEncodingVector::uniform_random(int n_sites, Rng& rng) {
  IndexEncodingSet set(n_sites);
  std::vector<BellLabel> labels(set.size());
  for (BellLabel& label : labels)
    label = {rng.bit(), rng.bit()};
  return MessageEncodingVector(n_sites, std::move(labels));
}

SigmaState::SigmaState(int n_sites, int n_terms, ComplexMatrix matrix)
    : n_(n_sites), n_terms_(n_terms), mat_(std::move(matrix)) {
  check_n(n_sites);
  if (n_terms_ < 1) throw ValidationError("mixture needs at least one term");
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  if (mat_.rows() != dim || mat_.cols() != dim)
    throw ValidationError("encoding-mixture matrix must be 2^N x 2^N");
  if (!qsim::is_hermitian(mat_, kHermTol))
    throw ValidationError("encoding-mixture matrix must be Hermitian");
  const double expected = n_terms_ * std::pow(2.0, n_sites - 2);
  if (std::abs(trace() - expected) > kTraceTol)
    throw ValidationError("encoding-mixture trace must be n_terms 2^(N-2)");
}

SigmaState build_sigma(int n_sites, const MessageEncodingVector& m) {
  if (m.n_sites() != n_sites)
    throw ValidationError("encoding vector does not cover this register size");
  return SigmaState(n_sites, static_cast<int>(m.index_set().size()),
                    sigma_matrix(m.index_set(), m.labels()));
}

SigmaState build_sigma_star(int n_sites, BellLabel label) {
  check_n(n_sites);
  if ((label.x0 & ~1) || (label.x1 & ~1)) throw ValidationError("label must be a bit pair");
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  const ComplexMatrix proj = qsim::bell_projector(label.x0, label.x1);
  for (int j = 1; j < n_sites; ++j) {
    const int sites[] = {j, n_sites};
    sum += qsim::embed_gate(proj, sites, n_sites);
  }
  return SigmaState(n_sites, n_sites - 1, std::move(sum));
}

ComplexMatrix heisenberg_star(int n_sites) {
  check_n(n_sites);
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (int j = 1; j < n_sites; ++j) {
    const int sites[] = {j, n_sites};
    for (const ComplexMatrix* p : {&qsim::pauli_x(), &qsim::pauli_y(), &qsim::pauli_z()}) {
      ComplexMatrix coupling(4, 4);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          for (int c = 0; c < 2; ++c)
            for (int d = 0; d < 2; ++d)
              coupling(2 * a + c, 2 * b + d) = (*p)(a, b) * (*p)(c, d);
      sum += qsim::embed_gate(coupling, sites, n_sites);
    }
  }
  return 0.25 * sum;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  auto solver = solve(m);
  std::vector<double> out(static_cast<std::size_t>(solver.eigenvalues().size()));
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
    out[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return out;
}

double lambda_max(const ComplexMatrix& m) {
  return solve(m).eigenvalues().maxCoeff();
}

double trace_norm(const ComplexMatrix& m) {
  return solve(m).eigenvalues().cwiseAbs().sum();
}

double default_alpha(int n_sites) {
  check_n(n_sites);
  return 16.0 * n_sites * (n_sites - 1) / 2.0;
}

double i_alpha(int n_sites, double alpha) {
  const EnumerationResult r = enumerate_encodings(n_sites, alpha);
  const double n_pairs = static_cast<double>(n_sites) * (n_sites - 1) / 2.0;
  return r.trace_root / (n_pairs * std::pow(2.0, n_sites));
}

BoundReport bound_chain_report(int n_sites, double alpha) {
  check_n(n_sites);
  if (alpha <= 1.0) throw ValidationError("alpha must exceed 1");
  const double n_pairs = static_cast<double>(n_sites) * (n_sites - 1) / 2.0;

  BoundReport report;
  report.n_sites = n_sites;
  report.alpha = alpha;
  report.lambda_max_sigma_star = lambda_max(build_sigma_star(n_sites).matrix());
  report.lambda_max_bound =
      n_sites * n_sites / 4.0 + n_sites / 4.0 - 0.5;
  report.guess_bound = 0.5 + 1.0 / n_sites;
  report.amplification = std::pow(4.0, n_pairs / alpha);

  auto leq = [](double a, double b) { return a <= b * (1.0 + kChainSlack) + kChainSlack; };

  bool ok = true;
  // Star law N/2 and the closing algebraic identity hold at any size.
  ok = ok && std::abs(report.lambda_max_sigma_star - n_sites / 2.0) <= kChainSlack;
  ok = ok && leq(n_sites / 2.0, report.lambda_max_bound);
  ok = ok && std::abs(report.lambda_max_bound / n_pairs - report.guess_bound) <= kChainSlack;

  if (n_sites <= kEnumerationCap) {
    const EnumerationResult r = enumerate_encodings(n_sites, alpha);
    report.i_alpha_numeric = r.trace_root / (n_pairs * std::pow(2.0, n_sites));
    report.lambda_max_sigma_mstar = r.lmax_mstar;

    const double dim = std::pow(2.0, n_sites);
    // Tr[(A)^{1/a}] <= 2^N lmax(A)^{1/a}
    ok = ok && leq(r.trace_root, dim * std::pow(r.lmax_a_alpha, 1.0 / alpha));
    // lmax(A) <= sum_m lmax(sigma_m)^a (iterated subadditivity)
    ok = ok && leq(r.lmax_a_alpha, r.sum_lmax_pow);
    // sum_m lmax^a <= 4^{|E|} lmax(sigma_{m*})^a
    ok = ok && leq(r.sum_lmax_pow,
                   std::pow(4.0, n_pairs) * std::pow(r.lmax_mstar, alpha));
    // lmax(sigma_{m*}) <= N^2/4 + N/4 - 1/2
    ok = ok && leq(r.lmax_mstar, report.lambda_max_bound);
    // I_alpha <= (lmax(sigma_{m*})/|E|) 4^{|E|/a}
    ok = ok && leq(*report.i_alpha_numeric,
                   r.lmax_mstar / n_pairs * report.amplification);
    // I_alpha <= (1/2 + 1/N) 4^{|E|/a}
    ok = ok && leq(*report.i_alpha_numeric, report.guess_bound * report.amplification);
  }
  report.chain_ok = ok;
  return report;
}

std::string bound_report_csv_header() {
  return "N,alpha,i_alpha,lmax_star,lmax_bound,guess_bound";
}

std::string bound_report_csv_row(const BoundReport& report) {
  char buf[192];
  std::string i_col;
  if (report.i_alpha_numeric) {
    char tmp[48];
    std::snprintf(tmp, sizeof(tmp), "%.12g", *report.i_alpha_numeric);
    i_col = tmp;
  }
  std::snprintf(buf, sizeof(buf), "%d,%.12g,%s,%.12g,%.12g,%.12g", report.n_sites,
                report.alpha, i_col.c_str(), report.lambda_max_sigma_star,
                report.lambda_max_bound, report.guess_bound);
  return buf;
}

}  // namespace otsim::spectra
