#pragma once

// Command layer behind the CLI: each verb is a plain function over a
// RunConfig that writes its primary outputs to files derived from
// `output`.  Keeping the verbs in the library makes every run scriptable
// and lets tests replay commands byte for byte.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace otsim::commands {

// Flat run configuration.  A value is "set" when the key appeared in the
// config file or on the command line; required keys depend on the command.
struct RunConfig {
  std::string command;
  std::optional<std::uint64_t> seed;  // required everywhere
  std::optional<int> n;               // register size
  int sigma = 2;
  int lambda_bits = 16;
  long tau_ticks = 8;
  std::uint64_t hashes_per_tick = 64;
  double rate = 1.0;   // per-tick depolarization survival
  int m = 2;           // bounded-storage cell budget
  long trials = 1;
  std::string variant = "nqsm";      // nqsm | bqsm | oneshot_tlp
  std::string attack = "sdc_known";  // attack-sim strategy, comma separated
  int n_min = 2;                     // spectra sweep range
  int n_max = 6;
  std::string circuit;               // run-2pc circuit file
  std::string backend = "ideal";     // run-2pc transfer backend
  int lambda_gc = 128;
  std::string garbler_hex;           // run-2pc inputs, hex integers
  std::string evaluator_hex;
  std::string output = "otsim-out";  // primary output base path
};

// Applies one key=value setting; unknown keys and unparsable values are
// usage errors (ValidationError).
void apply_setting(RunConfig& cfg, std::string_view key, std::string_view value);

// Flat key=value file, one setting per line, '#' comments and blank lines
// allowed.  Settings overwrite defaults; later CLI flags overwrite these.
void load_config_text(RunConfig& cfg, std::string_view text);
void load_config_file(RunConfig& cfg, const std::string& path);

// Primary output files a command will write for a given base path.
std::string transcript_path(const RunConfig& cfg);  // <output>.log
std::string table_path(const RunConfig& cfg);       // <output>.csv
std::string report_path(const RunConfig& cfg);      // <output>.txt

// Verbs.  All validate their required keys, write the files above, and
// return a process exit status (0 on success).  Failures throw.
int cmd_run_ot(const RunConfig& cfg);      // .log + .csv
int cmd_spectra(const RunConfig& cfg);     // .csv
int cmd_attack_sim(const RunConfig& cfg);  // .csv
int cmd_run_2pc(const RunConfig& cfg);     // .txt
int cmd_tlp_bench(const RunConfig& cfg);   // .csv (timing goes to stdout)

// Dispatch on cfg.command; "run-oneshot-ot" presets variant=oneshot_tlp.
int run_command(const RunConfig& cfg);

}  // namespace otsim::commands
