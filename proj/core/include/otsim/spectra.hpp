#pragma once

#include <optional>
#include <string>
#include <vector>

#include "otsim/qsim.hpp"
#include "otsim/rng.hpp"

namespace otsim::spectra {

// All (k,l) site pairs with k < l, in lexicographic order.
struct SitePair {
  int k;
  int l;
  bool operator==(const SitePair&) const = default;
};

class IndexEncodingSet {
 public:
  explicit IndexEncodingSet(int n_sites);

  int n_sites() const { return n_; }
  const std::vector<SitePair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  std::size_t position(SitePair pair) const;  // throws if absent

 private:
  int n_;
  std::vector<SitePair> pairs_;
};

// One of the four two-bit messages attached to a pair.
struct BellLabel {
  int x0;
  int x1;
  bool operator==(const BellLabel&) const = default;
};

// Complete assignment of a message to every pair of the index set.
class MessageEncodingVector {
 public:
  MessageEncodingVector(int n_sites, std::vector<BellLabel> labels);
  static MessageEncodingVector constant(int n_sites, BellLabel label);
  static MessageEncodingVector uniform_random(int n_sites, Rng& rng);

  int n_sites() const { return index_set_.n_sites(); }
  const IndexEncodingSet& index_set() const { return index_set_; }
  const std::vector<BellLabel>& labels() const { return labels_; }
  BellLabel at(SitePair pair) const { return labels_[index_set_.position(pair)]; }

 private:
  IndexEncodingSet index_set_;
  std::vector<BellLabel> labels_;
};

// Unnormalized encoding mixture: sum over pairs of the pair-state projector
// dictated by the encoding, tensored with identity elsewhere.
class SigmaState {
 public:
  // n_terms is the number of projector summands; each contributes 2^(N-2)
  // to the trace, which the constructor checks.
  SigmaState(int n_sites, int n_terms, ComplexMatrix matrix);

  int n_sites() const { return n_; }
  int n_terms() const { return n_terms_; }
  const ComplexMatrix& matrix() const { return mat_; }
  double trace() const { return mat_.trace().real(); }

 private:
  int n_;
  int n_terms_;
  ComplexMatrix mat_;
};

SigmaState build_sigma(int n_sites, const MessageEncodingVector& m);

// Star mixture centered on site N: every pair (j, N) carries the same label.
SigmaState build_sigma_star(int n_sites, BellLabel label = {1, 1});

// Spin-coupling operator whose ground energy -(1+N)/4 certifies the star
// mixture's largest eigenvalue N/2.
ComplexMatrix heisenberg_star(int n_sites);

// Ascending eigenvalues; input must be Hermitian within 1e-10.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m);
double lambda_max(const ComplexMatrix& m);
double trace_norm(const ComplexMatrix& m);

// Largest register size for which the 4^{|E|} encoding enumeration runs.
inline constexpr int kEnumerationCap = 4;

double default_alpha(int n_sites);  // 16 |E|

// Exact evaluation of (1/(|E| 2^N)) Tr[(sum_m sigma_m^alpha)^{1/alpha}] by
// full enumeration of the 4^{|E|} encodings.
double i_alpha(int n_sites, double alpha);

struct BoundReport {
  int n_sites = 0;
  double alpha = 0;
  // Numeric entries, present only within the enumeration cap.
  std::optional<double> i_alpha_numeric;
  std::optional<double> lambda_max_sigma_mstar;  // max over all encodings
  // Analytic entries, valid for any N.
  double lambda_max_sigma_star = 0;  // star law N/2 (numerically confirmed)
  double lambda_max_bound = 0;       // N^2/4 + N/4 - 1/2
  double guess_bound = 0;            // 1/2 + 1/N
  double amplification = 0;          // 4^{|E|/alpha}
  bool chain_ok = false;
};

// Evaluates every step of the guessing-probability chain and records whether
// each inequality holds with 1e-9 slack.
BoundReport bound_chain_report(int n_sites, double alpha);

std::string bound_report_csv_header();
std::string bound_report_csv_row(const BoundReport& report);

}  // namespace otsim::spectra
