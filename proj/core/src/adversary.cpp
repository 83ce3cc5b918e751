#include "otsim/adversary.hpp"

#include <algorithm>
#include <cmath>

#include "otsim/errors.hpp"
#include "otsim/noise.hpp"

namespace otsim::adversary {

namespace {

using protocol::SitePair;

void check_trials(long trials) {
  if (trials < 1) throw ValidationError("trials must be >= 1");
}

struct TrialCounters {
  long both = 0;
  long any = 0;

  void record(int gx0, int gx1, int x0, int x1) {
    const bool b0 = gx0 == x0;
    const bool b1 = gx1 == x1;
    if (b0 && b1) ++both;
    if (b0 || b1) ++any;
  }
};

}  // namespace

AttackStats make_stats(long trials, long both_correct, long any_correct) {
  check_trials(trials);
  AttackStats s;
  s.trials = trials;
  s.success_both = static_cast<double>(both_correct) / trials;
  s.success_any_single = static_cast<double>(any_correct) / trials;
  s.std_error =
      std::sqrt(s.success_both * (1.0 - s.success_both) / trials);
  return s;
}

std::pair<int, int> sdc_attack(qsim::QuantumRegister reg, int k, int l,
                               Rng& rng) {
  if (k < 1 || k >= l || l > reg.n_sites())
    throw ValidationError("attack pair out of range");
  const int pair_sites[] = {k, l};
  const int k_site[] = {k};
  reg = qsim::apply_gate(reg, qsim::cnot(), pair_sites);
  reg = qsim::apply_gate(reg, qsim::hadamard(), k_site);
  const int m_k = qsim::measure_site(reg, k, qsim::Basis::kComputational, rng).outcome;
  const int m_l = qsim::measure_site(reg, l, qsim::Basis::kComputational, rng).outcome;
  return {m_k, m_l};
}

AttackStats sdc_known_experiment(int n_sites, long trials, std::uint64_t seed) {
  check_trials(trials);
  Rng rng(seed);
  TrialCounters counters;
  for (long t = 0; t < trials; ++t) {
    const int x0 = rng.bit(), x1 = rng.bit();
    const SitePair pair = protocol::draw_pair(n_sites, rng);
    qsim::QuantumRegister reg =
        qsim::prepare_register(n_sites, pair.k, pair.l, x0, x1, rng);
    auto [gx0, gx1] = sdc_attack(std::move(reg), pair.k, pair.l, rng);
    counters.record(gx0, gx1, x0, x1);
  }
  return make_stats(trials, counters.both, counters.any);
}

AttackStats sdc_unknown_experiment(int n_sites, long trials, std::uint64_t seed) {
  check_trials(trials);
  Rng rng(seed);
  TrialCounters counters;
  for (long t = 0; t < trials; ++t) {
    const int x0 = rng.bit(), x1 = rng.bit();
    const SitePair pair = protocol::draw_pair(n_sites, rng);
    const SitePair guess = protocol::draw_pair(n_sites, rng);
    qsim::QuantumRegister reg =
        qsim::prepare_register(n_sites, pair.k, pair.l, x0, x1, rng);
    auto [gx0, gx1] = sdc_attack(std::move(reg), guess.k, guess.l, rng);
    counters.record(gx0, gx1, x0, x1);
  }
  return make_stats(trials, counters.both, counters.any);
}

double sdc_unknown_index_success(int n_sites) {
  const double pairs = static_cast<double>(n_sites) * (n_sites - 1) / 2.0;
  return 1.0 / pairs + (1.0 - 1.0 / pairs) * 0.25;
}

BqsmAttackResult bqsm_subset_attack(const protocol::ProtocolParams& params,
                                    int memory_bound, long trials,
                                    std::uint64_t seed,
                                    qsim::Basis discard_basis) {
  params.validate();
  check_trials(trials);
  if (memory_bound < 0 || memory_bound > params.n)
    throw ValidationError("memory_bound must be in [0, n]");
  Rng rng(seed);
  TrialCounters counters;
  long hits = 0;
  for (long t = 0; t < trials; ++t) {
    const int x0 = rng.bit(), x1 = rng.bit();
    const SitePair pair = protocol::draw_pair(params.n, rng);
    qsim::QuantumRegister reg =
        qsim::prepare_register(params.n, pair.k, pair.l, x0, x1, rng);

    const std::vector<int> kept =
        noise::uniform_subset(params.n, memory_bound, rng);
    std::vector<int> outcome(params.n + 1, -1);
    for (int site = 1; site <= params.n; ++site) {
      if (!std::binary_search(kept.begin(), kept.end(), site))
        outcome[site] =
            qsim::measure_site(reg, site, discard_basis, rng).outcome;
    }

    const bool k_kept = std::binary_search(kept.begin(), kept.end(), pair.k);
    const bool l_kept = std::binary_search(kept.begin(), kept.end(), pair.l);
    int gx0, gx1;
    if (k_kept && l_kept) {
      ++hits;
      std::tie(gx0, gx1) = sdc_attack(std::move(reg), pair.k, pair.l, rng);
    } else {
      // Finish measuring the revealed pair in the discard basis; its parity
      // yields one input bit exactly, the other bit is a coin flip.
      for (int site : {pair.k, pair.l})
        if (outcome[site] < 0)
          outcome[site] =
              qsim::measure_site(reg, site, discard_basis, rng).outcome;
      const int parity = outcome[pair.k] ^ outcome[pair.l];
      if (discard_basis == qsim::Basis::kComputational) {
        gx1 = parity;
        gx0 = rng.bit();
      } else {
        gx0 = parity;
        gx1 = rng.bit();
      }
    }
    counters.record(gx0, gx1, x0, x1);
  }
  BqsmAttackResult res;
  res.stats = make_stats(trials, counters.both, counters.any);
  res.stored_pair_rate = static_cast<double>(hits) / trials;
  return res;
}

double bqsm_subset_attack_success(int n_sites, int memory_bound) {
  const double hit =
      noise::bqsm_survival_probability(n_sites, std::min(memory_bound, n_sites))
          .enumeration;
  return hit + (1.0 - hit) * 0.5;
}

AttackStats nqsm_delay_attack(const protocol::ProtocolParams& params,
                              double rate, long trials, std::uint64_t seed) {
  params.validate();
  check_trials(trials);
  const noise::NqsmModel model{rate, params.tau_ticks};
  model.validate();
  Rng rng(seed);
  TrialCounters counters;
  for (long t = 0; t < trials; ++t) {
    const int x0 = rng.bit(), x1 = rng.bit();
    const SitePair pair = protocol::draw_pair(params.n, rng);
    qsim::QuantumRegister reg =
        qsim::prepare_register(params.n, pair.k, pair.l, x0, x1, rng);
    reg = noise::advance_storage(reg, params.tau_ticks, model, rng);
    auto [gx0, gx1] = sdc_attack(std::move(reg), pair.k, pair.l, rng);
    counters.record(gx0, gx1, x0, x1);
  }
  return make_stats(trials, counters.both, counters.any);
}

double delay_attack_success(double rate, long tau_ticks) {
  if (rate < 0.0 || rate > 1.0)
    throw ValidationError("rate must be in [0, 1]");
  if (tau_ticks < 0) throw ValidationError("tau_ticks must be >= 0");
  const double s = std::pow(rate, static_cast<double>(tau_ticks));
  return s * s + (1.0 - s * s) * 0.25;
}

AttackStats honest_baseline_experiment(const protocol::ProtocolParams& params,
                                       int y, long trials, std::uint64_t seed) {
  params.validate();
  check_trials(trials);
  if (y != 0 && y != 1) throw ValidationError("choice y must be a bit");
  Rng rng(seed);
  TrialCounters counters;
  for (long t = 0; t < trials; ++t) {
    const int x0 = rng.bit(), x1 = rng.bit();
    protocol::RunResult run =
        protocol::run_protocol(params, x0, x1, y, rng.next_u64());
    const int known = run.output;
    const int guessed = rng.bit();
    const int gx0 = y == 0 ? known : guessed;
    const int gx1 = y == 0 ? guessed : known;
    counters.record(gx0, gx1, x0, x1);
  }
  return make_stats(trials, counters.both, counters.any);
}

AuditVerdict bound_audit(const AttackStats& stats,
                         const protocol::ProtocolParams& params) {
  params.validate();
  if (stats.trials < 1) throw ValidationError("stats carry no trials");
  AuditVerdict v;
  v.bound = 0.5 + 1.0 / params.n;
  v.threshold = v.bound + 3.0 * stats.std_error;
  v.within_bound = stats.success_both <= v.threshold;
  return v;
}

}  // namespace otsim::adversary
