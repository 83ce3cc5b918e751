// Command line front end: maps flags onto a RunConfig and dispatches to the
// command layer.  Precedence is defaults < --config file < explicit flags.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "otsim/commands.hpp"
#include "otsim/errors.hpp"

namespace {

using otsim::commands::RunConfig;

struct FlagSet {
  std::string config_path;
  // Raw textual values; only flags the user actually passed are applied, so
  // they can override the config file without clobbering its other keys.
  std::vector<std::pair<std::string, std::string>> settings;
};

void add_common_flags(CLI::App* cmd, FlagSet& flags) {
  cmd->add_option("--config", flags.config_path, "key=value config file");

  static const char* keys[] = {"seed",    "n",        "sigma",   "lambda",
                               "tau_ticks", "hashes_per_tick", "rate",    "m",
                               "trials",  "variant",  "attack",  "n_min",
                               "n_max",   "circuit",  "backend", "lambda_gc",
                               "garbler", "evaluator", "output"};
  for (const char* key : keys) {
    cmd->add_option_function<std::string>(
        std::string("--") + key,
        [&flags, key](const std::string& value) { flags.settings.emplace_back(key, value); },
        std::string("config key '") + key + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"oblivious-transfer simulation toolkit"};
  app.require_subcommand(1);

  const char* commands[] = {"run-ot",  "run-oneshot-ot", "attack-sim",
                            "spectra", "run-2pc",        "tlp-bench"};
  const char* blurbs[] = {
      "honest protocol runs with transcript log and summary table",
      "run-ot preset for the single-message puzzle variant",
      "named attack strategies vs the guessing bound",
      "spectral bound table over a register-size sweep",
      "one-message two-party computation on a circuit file",
      "puzzle generate/solve counters (timing on stdout)"};

  FlagSet flags;
  for (std::size_t i = 0; i < std::size(commands); ++i)
    add_common_flags(app.add_subcommand(commands[i], blurbs[i]), flags);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg;
    cfg.command = app.get_subcommands().front()->get_name();
    if (!flags.config_path.empty()) otsim::commands::load_config_file(cfg, flags.config_path);
    for (const auto& [key, value] : flags.settings)
      otsim::commands::apply_setting(cfg, key, value);
    return otsim::commands::run_command(cfg);
  } catch (const otsim::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unexpected error: %s\n", e.what());
    return 4;
  }
}
