#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "otsim/spectra.hpp"
#include "support/jacobi_oracle.hpp"

using namespace otsim;
using namespace otsim::spectra;

namespace {

// Values frozen from an independent high-level reference implementation of
// the full 4^{|E|} enumeration (same definition, separate codebase).
constexpr double kIAlpha2_16 = 1.0;
constexpr double kIAlpha3_48 = 0.702088225440;
constexpr double kIAlpha3_64 = 0.693060181480;
constexpr double kIAlpha4_96 = 0.684203033647;
constexpr double kIAlpha4_128 = 0.679739785200;

// Independent dense embedding used by oracle-side constructions: places a
// 4x4 two-site operator on (k,l) of an n-site register entry by entry.
ComplexMatrix embed_pair_oracle(const ComplexMatrix& op, int k, int l, int n) {
  const int dim = 1 << n;
  ComplexMatrix out = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      const int bik = (i >> (n - k)) & 1, bil = (i >> (n - l)) & 1;
      const int bjk = (j >> (n - k)) & 1, bjl = (j >> (n - l)) & 1;
      const int rest_i = i & ~((1 << (n - k)) | (1 << (n - l)));
      const int rest_j = j & ~((1 << (n - k)) | (1 << (n - l)));
      if (rest_i != rest_j) continue;
      out(i, j) = op(2 * bik + bil, 2 * bjk + bjl);
    }
  return out;
}

// Bell projectors written out from the closed-form amplitudes.
ComplexMatrix bell_projector_oracle(int x0, int x1) {
  ComplexVector v = ComplexVector::Zero(4);
  const double s = 1.0 / std::sqrt(2.0);
  v(x1) = s;
  v(2 + (1 - x1)) = (x0 ? -s : s);
  return v * v.adjoint();
}

ComplexMatrix kron_with_i2(const ComplexMatrix& a) {
  ComplexMatrix out = ComplexMatrix::Zero(2 * a.rows(), 2 * a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out(2 * i, 2 * j) = a(i, j);
      out(2 * i + 1, 2 * j + 1) = a(i, j);
    }
  return out;
}

}  // namespace

TEST_CASE("index set enumerates ordered pairs") {
  IndexEncodingSet set(4);
  CHECK(set.size() == 6);
  CHECK(set.pairs().front() == SitePair{1, 2});
  CHECK(set.pairs().back() == SitePair{3, 4});
  CHECK(set.position({2, 4}) == 4);
  CHECK_THROWS_AS(set.position({4, 2}), ValidationError);
  CHECK_THROWS_AS(IndexEncodingSet(1), ValidationError);
}

TEST_CASE("encoding vectors are complete and validated") {
  MessageEncodingVector c = MessageEncodingVector::constant(3, {1, 0});
  CHECK(c.labels().size() == 3);
  CHECK(c.at({1, 3}) == BellLabel{1, 0});

  Rng rng(2);
  MessageEncodingVector r = MessageEncodingVector::uniform_random(4, rng);
  CHECK(r.labels().size() == 6);

  CHECK_THROWS_AS(MessageEncodingVector(3, {{0, 0}}), ValidationError);
  CHECK_THROWS_AS(MessageEncodingVector(2, {{2, 0}}), ValidationError);
}

TEST_CASE("single-pair mixture at N=2 is one projector") {
  SigmaState s = build_sigma(2, MessageEncodingVector::constant(2, {0, 0}));
  CHECK((s.matrix() - bell_projector_oracle(0, 0)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(s.trace() == doctest::Approx(1.0));
}

TEST_CASE("mixture trace counts terms") {
  SigmaState s = build_sigma(3, MessageEncodingVector::constant(3, {0, 1}));
  CHECK(s.trace() == doctest::Approx(6.0));  // 3 pairs x 2^(3-2)

  ComplexMatrix wrong = ComplexMatrix::Identity(8, 8);
  CHECK_THROWS_AS(SigmaState(3, 3, wrong), ValidationError);
}

TEST_CASE("N=3 constant-encoding spectrum matches a brute-force oracle") {
  // Oracle route: independent embedding + independent Jacobi solver.
  ComplexMatrix oracle = ComplexMatrix::Zero(8, 8);
  for (auto [k, l] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 3}})
    oracle += embed_pair_oracle(bell_projector_oracle(1, 1), k, l, 3);
  std::vector<double> expect = test_support::jacobi_hermitian_eigenvalues(oracle);

  SigmaState s = build_sigma(3, MessageEncodingVector::constant(3, {1, 1}));
  std::vector<double> got = hermitian_eigenvalues(s.matrix());
  REQUIRE(got.size() == expect.size());
  for (std::size_t i = 0; i < got.size(); ++i)
    CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-9));
}

TEST_CASE("star mixture largest eigenvalue follows N/2") {
  CHECK(lambda_max(build_sigma_star(2).matrix()) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(lambda_max(build_sigma_star(3).matrix()) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK(std::abs(lambda_max(build_sigma_star(6).matrix()) - 3.0) <= 1e-9);
  for (int n = 2; n <= 8; ++n)
    CHECK(std::abs(lambda_max(build_sigma_star(n).matrix()) - n / 2.0) <= 1e-9);
}

TEST_CASE("spin-star ground energy is -(1+N)/4") {
  for (int n = 2; n <= 8; ++n) {
    std::vector<double> evals = hermitian_eigenvalues(heisenberg_star(n));
    CHECK(std::abs(evals.front() - (-(1.0 + n) / 4.0)) <= 1e-9);
  }
}

TEST_CASE("eigenvalue routine basics") {
  std::vector<double> z = hermitian_eigenvalues(qsim::pauli_z());
  CHECK(z[0] == doctest::Approx(-1.0));
  CHECK(z[1] == doctest::Approx(1.0));

  std::vector<double> id = hermitian_eigenvalues(ComplexMatrix::Identity(4, 4));
  for (double v : id) CHECK(v == doctest::Approx(1.0));

  ComplexMatrix not_herm(2, 2);
  not_herm << 0, 1, 0, 0;
  CHECK_THROWS_AS(hermitian_eigenvalues(not_herm), ValidationError);
}

TEST_CASE("eigenvalues agree with the independent Jacobi oracle on random input") {
  Rng rng(31);
  for (int rep = 0; rep < 5; ++rep) {
    const int dim = 12;
    ComplexMatrix m(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        m(i, j) = Complex(rng.real() - 0.5, rng.real() - 0.5);
    ComplexMatrix h = (m + m.adjoint()) / 2.0;
    std::vector<double> got = hermitian_eigenvalues(h);
    std::vector<double> expect = test_support::jacobi_hermitian_eigenvalues(h);
    for (std::size_t i = 0; i < got.size(); ++i)
      CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-9));
  }
}

TEST_CASE("trace norm basics and max-eigenvalue subadditivity") {
  ComplexMatrix rho = bell_projector_oracle(0, 1);
  CHECK(trace_norm(rho - rho) == doctest::Approx(0.0));

  ComplexMatrix p0 = ComplexMatrix::Zero(2, 2), p1 = ComplexMatrix::Zero(2, 2);
  p0(0, 0) = 1;
  p1(1, 1) = 1;
  CHECK(trace_norm(p0 - p1) == doctest::Approx(2.0));

  Rng rng(77);
  for (int rep = 0; rep < 100; ++rep) {
    const int dim = 8;
    ComplexMatrix x(dim, dim), y(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        x(i, j) = Complex(rng.real() - 0.5, rng.real() - 0.5);
        y(i, j) = Complex(rng.real() - 0.5, rng.real() - 0.5);
      }
    ComplexMatrix a = x * x.adjoint();
    ComplexMatrix b = y * y.adjoint();
    CHECK(lambda_max(a + b) <= lambda_max(a) + lambda_max(b) + 1e-9);
  }
}

TEST_CASE("worst-case mixture eigenvalue stays under the quadratic bound") {
  auto bound = [](int n) { return n * n / 4.0 + n / 4.0 - 0.5 + 1e-9; };

  // Exhaustive at N=3: all 4^3 encodings.
  for (int e = 0; e < 64; ++e) {
    std::vector<BellLabel> labels(3);
    for (int p = 0; p < 3; ++p) labels[p] = {(e >> (2 * p + 1)) & 1, (e >> (2 * p)) & 1};
    SigmaState s = build_sigma(3, MessageEncodingVector(3, labels));
    CHECK(lambda_max(s.matrix()) <= bound(3));
  }

  // Sampled plus the four constant encodings at larger N.
  Rng rng(5150);
  for (int n : {4, 5, 6}) {
    for (int x0 = 0; x0 < 2; ++x0)
      for (int x1 = 0; x1 < 2; ++x1) {
        SigmaState s = build_sigma(n, MessageEncodingVector::constant(n, {x0, x1}));
        CHECK(lambda_max(s.matrix()) <= bound(n));
      }
    for (int rep = 0; rep < 50; ++rep) {
      SigmaState s = build_sigma(n, MessageEncodingVector::uniform_random(n, rng));
      CHECK(lambda_max(s.matrix()) <= bound(n));
    }
  }
}

TEST_CASE("constant-encoding mixture splits into previous size plus star") {
  for (int n = 3; n <= 6; ++n)
    for (int x0 = 0; x0 < 2; ++x0)
      for (int x1 = 0; x1 < 2; ++x1) {
        const BellLabel label{x0, x1};
        ComplexMatrix whole = build_sigma(n, MessageEncodingVector::constant(n, label)).matrix();
        ComplexMatrix prev =
            n == 2 ? ComplexMatrix::Zero(4, 4)
                   : kron_with_i2(
                         build_sigma(n - 1, MessageEncodingVector::constant(n - 1, label))
                             .matrix());
        ComplexMatrix star = build_sigma_star(n, label).matrix();
        CHECK((whole - prev - star).cwiseAbs().maxCoeff() <= 1e-10);
      }
}

TEST_CASE("star spectrum does not depend on the label") {
  for (int n = 3; n <= 5; ++n) {
    std::vector<double> reference = hermitian_eigenvalues(build_sigma_star(n).matrix());
    for (int x0 = 0; x0 < 2; ++x0)
      for (int x1 = 0; x1 < 2; ++x1) {
        std::vector<double> other =
            hermitian_eigenvalues(build_sigma_star(n, {x0, x1}).matrix());
        for (std::size_t i = 0; i < reference.size(); ++i)
          CHECK(other[i] == doctest::Approx(reference[i]).epsilon(1e-9));
      }
  }
}

TEST_CASE("enumerated guessing functional matches frozen reference values") {
  CHECK(default_alpha(2) == doctest::Approx(16.0));
  CHECK(default_alpha(3) == doctest::Approx(48.0));
  CHECK(default_alpha(4) == doctest::Approx(96.0));

  CHECK(std::abs(i_alpha(2, 16.0) - kIAlpha2_16) <= 1e-9);
  CHECK(std::abs(i_alpha(3, 48.0) - kIAlpha3_48) <= 1e-9);
  CHECK(std::abs(i_alpha(3, 64.0) - kIAlpha3_64) <= 1e-9);
  CHECK(std::abs(i_alpha(4, 96.0) - kIAlpha4_96) <= 1e-9);
  CHECK(std::abs(i_alpha(4, 128.0) - kIAlpha4_128) <= 1e-9);

  CHECK(i_alpha(2, 16.0) <= 1.0 + 1e-12);
  CHECK_THROWS_AS(i_alpha(5, 160.0), CapacityError);
  CHECK_THROWS_AS(i_alpha(3, 1.0), ValidationError);
}

TEST_CASE("bound chain report values and orderings") {
  BoundReport r4 = bound_chain_report(4, default_alpha(4));
  CHECK(r4.guess_bound == doctest::Approx(0.75));
  CHECK(r4.chain_ok);
  REQUIRE(r4.i_alpha_numeric.has_value());
  REQUIRE(r4.lambda_max_sigma_mstar.has_value());
  CHECK(*r4.i_alpha_numeric <=
        *r4.lambda_max_sigma_mstar / 6.0 * r4.amplification + 1e-9);
  CHECK(*r4.i_alpha_numeric <= r4.guess_bound * r4.amplification + 1e-9);

  BoundReport r8 = bound_chain_report(8, default_alpha(8));
  CHECK(r8.lambda_max_bound == doctest::Approx(17.5));
  CHECK(!r8.i_alpha_numeric.has_value());
  CHECK(r8.chain_ok);

  for (int n : {2, 3}) CHECK(bound_chain_report(n, default_alpha(n)).chain_ok);
}

TEST_CASE("bound report CSV schema") {
  CHECK(bound_report_csv_header() == "N,alpha,i_alpha,lmax_star,lmax_bound,guess_bound");
  BoundReport r3 = bound_chain_report(3, 48.0);
  std::string row = bound_report_csv_row(r3);
  CHECK(row.substr(0, 5) == "3,48,");
  CHECK(row.find("1.5") != std::string::npos);

  BoundReport r6 = bound_chain_report(6, default_alpha(6));
  std::string row6 = bound_report_csv_row(r6);
  // No numeric enumeration above the cap: empty i_alpha column.
  CHECK(row6.find("6,240,,3,") == 0);
}
