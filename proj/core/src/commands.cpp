#include "otsim/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "otsim/adversary.hpp"
#include "otsim/compile2pc.hpp"
#include "otsim/errors.hpp"
#include "otsim/gc.hpp"
#include "otsim/protocol.hpp"
#include "otsim/rng.hpp"
#include "otsim/spectra.hpp"
#include "otsim/tlp.hpp"

namespace otsim::commands {

namespace {

// Eigensolves above this register size get too slow for a CLI run.
constexpr int kSpectraSweepCap = 10;
// Upper limit on one benchmark ladder rung, in chain hashes.
constexpr std::uint64_t kBenchHashCap = 1'000'000'000;

[[noreturn]] void usage_error(const std::string& what) { throw ValidationError(what); }

long to_long(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(std::string(value), &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    usage_error("value for '" + std::string(key) + "' is not an integer: " +
                std::string(value));
  }
}

std::uint64_t to_u64(std::string_view key, std::string_view value) {
  try {
    if (!value.empty() && value.front() == '-') throw std::invalid_argument("negative");
    std::size_t used = 0;
    const unsigned long long v = std::stoull(std::string(value), &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    usage_error("value for '" + std::string(key) + "' is not an unsigned integer: " +
                std::string(value));
  }
}

double to_double(std::string_view key, std::string_view value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(value), &used);
    if (used != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    usage_error("value for '" + std::string(key) + "' is not a number: " +
                std::string(value));
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  while (!s.empty()) {
    const std::size_t comma = s.find(',');
    out.emplace_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

// Accept short aliases next to the canonical protocol variant names.
std::string canonical_variant(std::string_view v) {
  if (v == "nqsm") return "nqsm_2msg";
  if (v == "bqsm") return "bqsm_2msg";
  if (v == "oneshot") return "oneshot_tlp";
  return std::string(v);
}

std::uint64_t require_seed(const RunConfig& cfg) {
  if (!cfg.seed) usage_error("missing required key 'seed'");
  return *cfg.seed;
}

int require_n(const RunConfig& cfg) {
  if (!cfg.n) usage_error("missing required key 'n'");
  return *cfg.n;
}

protocol::ProtocolParams protocol_params(const RunConfig& cfg, std::string_view variant) {
  protocol::ProtocolParams p;
  p.n = require_n(cfg);
  p.sigma = cfg.sigma;
  p.tau_ticks = cfg.tau_ticks;
  p.variant = protocol::variant_from_name(canonical_variant(variant));
  p.lambda_bits = cfg.lambda_bits;
  p.hashes_per_tick = cfg.hashes_per_tick;
  p.validate();
  return p;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out.good()) throw Error("cannot open output file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out.good()) throw Error("write failed: " + path);
}

std::string num(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::uint64_t parse_hex_input(const std::string& hex, int width, const char* who) {
  std::string body = hex;
  if (body.rfind("0x", 0) == 0 || body.rfind("0X", 0) == 0) body = body.substr(2);
  if (body.empty()) usage_error(std::string(who) + " input is empty");
  std::uint64_t v = 0;
  try {
    std::size_t used = 0;
    v = std::stoull(body, &used, 16);
    if (used != body.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    usage_error(std::string(who) + " input is not a hex integer: " + hex);
  }
  if (width < 64 && (v >> width) != 0)
    usage_error(std::string(who) + " input does not fit in " + std::to_string(width) +
                " bits: " + hex);
  return v;
}

std::vector<int> value_bits(std::uint64_t v, int width) {
  std::vector<int> bits;
  for (int i = 0; i < width; ++i) bits.push_back(static_cast<int>((v >> i) & 1));
  return bits;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw Error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "seed")
    cfg.seed = to_u64(key, value);
  else if (key == "n")
    cfg.n = static_cast<int>(to_long(key, value));
  else if (key == "sigma")
    cfg.sigma = static_cast<int>(to_long(key, value));
  else if (key == "lambda")
    cfg.lambda_bits = static_cast<int>(to_long(key, value));
  else if (key == "tau_ticks")
    cfg.tau_ticks = to_long(key, value);
  else if (key == "hashes_per_tick")
    cfg.hashes_per_tick = to_u64(key, value);
  else if (key == "rate")
    cfg.rate = to_double(key, value);
  else if (key == "m")
    cfg.m = static_cast<int>(to_long(key, value));
  else if (key == "trials")
    cfg.trials = to_long(key, value);
  else if (key == "variant")
    cfg.variant = std::string(value);
  else if (key == "attack")
    cfg.attack = std::string(value);
  else if (key == "n_min")
    cfg.n_min = static_cast<int>(to_long(key, value));
  else if (key == "n_max")
    cfg.n_max = static_cast<int>(to_long(key, value));
  else if (key == "circuit")
    cfg.circuit = std::string(value);
  else if (key == "backend")
    cfg.backend = std::string(value);
  else if (key == "lambda_gc")
    cfg.lambda_gc = static_cast<int>(to_long(key, value));
  else if (key == "garbler")
    cfg.garbler_hex = std::string(value);
  else if (key == "evaluator")
    cfg.evaluator_hex = std::string(value);
  else if (key == "output")
    cfg.output = std::string(value);
  else
    usage_error("unknown config key: " + std::string(key));
}

void load_config_text(RunConfig& cfg, std::string_view text) {
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    std::string_view line = text.substr(
        start, end == std::string_view::npos ? std::string_view::npos : end - start);
    ++line_no;
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;

    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      usage_error("config line " + std::to_string(line_no) + " is not key=value");
    apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  load_config_text(cfg, read_text_file(path));
}

std::string transcript_path(const RunConfig& cfg) { return cfg.output + ".log"; }
std::string table_path(const RunConfig& cfg) { return cfg.output + ".csv"; }
std::string report_path(const RunConfig& cfg) { return cfg.output + ".txt"; }

int cmd_run_ot(const RunConfig& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  const protocol::ProtocolParams params = protocol_params(cfg, cfg.variant);
  if (cfg.trials < 1) usage_error("trials must be >= 1");

  Rng root(seed);
  std::string log;
  std::string csv = "trial,variant,n,x0,x1,y,k,l,output,expected,correct\n";
  const std::string vname(protocol::variant_name(params.variant));

  for (long t = 0; t < cfg.trials; ++t) {
    Rng tr = root.fork("trial-" + std::to_string(t));
    const int x0 = tr.bit();
    const int x1 = tr.bit();
    const int y = tr.bit();
    const protocol::RunResult run =
        protocol::run_protocol(params, x0, x1, y, tr.next_u64());
    const int expected = y ? x1 : x0;

    log += "# trial " + std::to_string(t) + "\n";
    log += run.transcript.to_log();

    char row[160];
    std::snprintf(row, sizeof(row), "%ld,%s,%d,%d,%d,%d,%d,%d,%d,%d,%d\n", t,
                  vname.c_str(), params.n, x0, x1, y, run.pair.k, run.pair.l,
                  run.output, expected, run.output == expected ? 1 : 0);
    csv += row;
  }

  write_file(transcript_path(cfg), log);
  write_file(table_path(cfg), csv);
  return 0;
}

int cmd_spectra(const RunConfig& cfg) {
  require_seed(cfg);
  if (cfg.n_min < 2) usage_error("n_min must be >= 2");
  if (cfg.n_max < cfg.n_min) usage_error("n_max must be >= n_min");
  if (cfg.n_max > kSpectraSweepCap)
    throw CapacityError("spectra sweep capped at n_max = " +
                        std::to_string(kSpectraSweepCap));

  std::string csv = spectra::bound_report_csv_header() + "\n";
  for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
    const spectra::BoundReport report =
        spectra::bound_chain_report(n, spectra::default_alpha(n));
    csv += spectra::bound_report_csv_row(report) + "\n";
  }
  write_file(table_path(cfg), csv);
  return 0;
}

int cmd_attack_sim(const RunConfig& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  if (cfg.trials < 1) usage_error("trials must be >= 1");
  const std::vector<std::string> attacks = split_list(cfg.attack);
  if (attacks.empty()) usage_error("no attack selected");

  Rng root(seed);
  std::string csv =
      "variant,N,M,r,tau,trials,success_both,success_single,std_err,bound,verdict\n";

  for (const std::string& attack : attacks) {
    const std::uint64_t attack_seed = root.fork(attack).seed();
    adversary::AttackStats stats;
    protocol::ProtocolParams params;

    if (attack == "sdc_known") {
      params = protocol_params(cfg, "nqsm_2msg");
      stats = adversary::sdc_known_experiment(params.n, cfg.trials, attack_seed);
    } else if (attack == "sdc_unknown") {
      params = protocol_params(cfg, "nqsm_2msg");
      stats = adversary::sdc_unknown_experiment(params.n, cfg.trials, attack_seed);
    } else if (attack == "delay") {
      params = protocol_params(cfg, "nqsm_2msg");
      stats = adversary::nqsm_delay_attack(params, cfg.rate, cfg.trials, attack_seed);
    } else if (attack == "bqsm_subset") {
      params = protocol_params(cfg, "bqsm_2msg");
      stats = adversary::bqsm_subset_attack(params, cfg.m, cfg.trials, attack_seed).stats;
    } else if (attack == "honest") {
      params = protocol_params(cfg, cfg.variant);
      stats = adversary::honest_baseline_experiment(params, 0, cfg.trials, attack_seed);
    } else {
      usage_error("unknown attack: " + attack);
    }

    const adversary::AuditVerdict audit = adversary::bound_audit(stats, params);
    char row[256];
    std::snprintf(row, sizeof(row), "%s,%d,%d,%s,%ld,%ld,%s,%s,%s,%s,%s\n",
                  attack.c_str(), params.n, cfg.m, num(cfg.rate).c_str(), cfg.tau_ticks,
                  stats.trials, num(stats.success_both).c_str(),
                  num(stats.success_any_single).c_str(), num(stats.std_error).c_str(),
                  num(audit.bound).c_str(), audit.within_bound ? "ok" : "exceeds");
    csv += row;
  }

  write_file(table_path(cfg), csv);
  return 0;
}

int cmd_run_2pc(const RunConfig& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  if (cfg.circuit.empty()) usage_error("missing required key 'circuit'");
  if (cfg.garbler_hex.empty()) usage_error("missing required key 'garbler'");
  if (cfg.evaluator_hex.empty()) usage_error("missing required key 'evaluator'");

  const gc::BooleanCircuit circuit = gc::parse_bristol(read_text_file(cfg.circuit));
  if (circuit.garbler_width > 64 || circuit.evaluator_width > 64)
    throw CapacityError("hex input parsing supports at most 64-bit blocks");
  const std::uint64_t gv =
      parse_hex_input(cfg.garbler_hex, circuit.garbler_width, "garbler");
  const std::uint64_t ev =
      parse_hex_input(cfg.evaluator_hex, circuit.evaluator_width, "evaluator");

  compile2pc::OtBackend backend;
  if (cfg.backend == "ideal") {
    backend.kind = compile2pc::BackendKind::kIdeal;
  } else if (cfg.backend == "quantum") {
    backend.kind = compile2pc::BackendKind::kQuantumSim;
    backend.params = protocol_params(cfg, "oneshot_tlp");
  } else {
    usage_error("unknown backend: " + cfg.backend);
  }

  const compile2pc::TwoPartyResult result =
      compile2pc::run_2pc(circuit, value_bits(gv, circuit.garbler_width),
                          value_bits(ev, circuit.evaluator_width), backend,
                          cfg.lambda_gc, seed);

  std::uint64_t out_value = 0;
  std::string bits;
  for (std::size_t i = 0; i < result.output_bits.size(); ++i) {
    if (!bits.empty()) bits += ',';
    bits += result.output_bits[i] ? '1' : '0';
    if (i < 64) out_value |= static_cast<std::uint64_t>(result.output_bits[i]) << i;
  }

  char value_hex[32];
  std::snprintf(value_hex, sizeof(value_hex), "0x%llx",
                static_cast<unsigned long long>(out_value));
  std::string report;
  report += "circuit=" + cfg.circuit + "\n";
  report += "backend=" + cfg.backend + "\n";
  report += "garbler_input=" + cfg.garbler_hex + "\n";
  report += "evaluator_input=" + cfg.evaluator_hex + "\n";
  report += "output_bits=" + bits + "\n";  // least significant first
  report += std::string("output_value=") + value_hex + "\n";
  report += "messages=" + std::to_string(result.record.messages.size()) + "\n";
  report += "forward=" + std::to_string(result.audit.forward_count) + "\n";
  report += "reverse=" + std::to_string(result.audit.reverse_count) + "\n";
  report += std::string("audit=") + (result.audit.one_shot ? "pass" : "fail") + "\n";

  write_file(report_path(cfg), report);
  return result.audit.one_shot ? 0 : 3;
}

int cmd_tlp_bench(const RunConfig& cfg) {
  const std::uint64_t seed = require_seed(cfg);
  if (cfg.trials < 1) usage_error("trials must be >= 1");
  const std::uint64_t base =
      static_cast<std::uint64_t>(cfg.tau_ticks) * cfg.hashes_per_tick;
  if (base < 1) usage_error("tau_ticks * hashes_per_tick must be >= 1");

  Rng rng(seed);
  std::string csv = "tau,gen_hashes,solve_hashes,roundtrip_ok\n";

  std::uint64_t tau = base;
  for (long i = 0; i < cfg.trials; ++i, tau *= 4) {
    if (tau > kBenchHashCap)
      throw CapacityError("benchmark rung exceeds " + std::to_string(kBenchHashCap) +
                          " hashes");
    tlp::PuzzleSolution s;
    s.k = 1;
    s.l = 2;
    s.r = rng.next_u64() & ((cfg.lambda_bits >= 64)
                                ? ~0ull
                                : ((1ull << cfg.lambda_bits) - 1));

    const auto t0 = std::chrono::steady_clock::now();
    const tlp::GenResult gen = tlp::puzzle_gen(tau, s, cfg.lambda_bits, rng);
    const auto t1 = std::chrono::steady_clock::now();
    const tlp::SolveResult sol = tlp::puzzle_sol(gen.puzzle);
    const auto t2 = std::chrono::steady_clock::now();

    const bool ok = sol.solution.k == s.k && sol.solution.l == s.l &&
                    sol.solution.r == s.r && sol.chain_hashes == tau;
    char row[128];
    std::snprintf(row, sizeof(row), "%llu,%llu,%llu,%d\n",
                  static_cast<unsigned long long>(tau),
                  static_cast<unsigned long long>(gen.chain_hashes),
                  static_cast<unsigned long long>(sol.chain_hashes), ok ? 1 : 0);
    csv += row;

    // Wall-clock rates go to stdout only; the CSV stays byte-reproducible.
    const auto ms = [](auto d) {
      return std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(d)
          .count();
    };
    const double solve_ms = ms(t2 - t1);
    std::printf("tau=%llu gen=%.3fms solve=%.3fms (%.3g hashes/s)\n",
                static_cast<unsigned long long>(tau), ms(t1 - t0), solve_ms,
                solve_ms > 0 ? static_cast<double>(tau) / (solve_ms / 1000.0) : 0.0);
  }

  write_file(table_path(cfg), csv);
  return 0;
}

int run_command(const RunConfig& cfg) {
  if (cfg.command == "run-ot") return cmd_run_ot(cfg);
  if (cfg.command == "run-oneshot-ot") {
    RunConfig preset = cfg;
    preset.variant = "oneshot_tlp";
    return cmd_run_ot(preset);
  }
  if (cfg.command == "attack-sim") return cmd_attack_sim(cfg);
  if (cfg.command == "spectra") return cmd_spectra(cfg);
  if (cfg.command == "run-2pc") return cmd_run_2pc(cfg);
  if (cfg.command == "tlp-bench") return cmd_tlp_bench(cfg);
  usage_error("unknown command: " + cfg.command);
}

}  // namespace otsim::commands
