// Microbenchmarks for the three hot paths: dense eigensolves behind the
// spectral tables, the sequential hash chain behind the puzzles, and
// garbling/evaluating boolean circuits.

#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>
#include <string>

#include "otsim/gc.hpp"
#include "otsim/protocol.hpp"
#include "otsim/rng.hpp"
#include "otsim/spectra.hpp"
#include "otsim/tlp.hpp"

namespace {

using namespace otsim;

gc::BooleanCircuit load_adder() {
  std::ifstream in(std::string(OTSIM_CIRCUITS_DIR) + "/adder8.bristol",
                   std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return gc::parse_bristol(ss.str());
}

void BM_StarSpectrum(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectra::lambda_max(spectra::build_sigma_star(n).matrix()));
  }
  state.SetLabel("dim=" + std::to_string(1 << n));
}
BENCHMARK(BM_StarSpectrum)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);

void BM_BoundChainReport(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(spectra::bound_chain_report(n, spectra::default_alpha(n)));
  }
}
BENCHMARK(BM_BoundChainReport)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_PuzzleSolve(benchmark::State& state) {
  const auto tau = static_cast<std::uint64_t>(state.range(0));
  Rng rng(1);
  const tlp::GenResult gen = tlp::puzzle_gen(tau, {1, 2, 0x2A}, 16, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tlp::puzzle_sol(gen.puzzle));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(tau));  // hashes/s
}
BENCHMARK(BM_PuzzleSolve)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);

void BM_Garble(benchmark::State& state) {
  const gc::BooleanCircuit adder = load_adder();
  Rng rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gc::garble(adder, static_cast<int>(state.range(0)), rng));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(adder.gates.size()));
}

void BM_GarbleEvaluate(benchmark::State& state) {
  const gc::BooleanCircuit adder = load_adder();
  Rng rng(3);
  const gc::GarbleResult g = gc::garble(adder, static_cast<int>(state.range(0)), rng);
  std::vector<gc::Label> inputs;
  for (int i = 0; i < adder.input_width(); ++i)
    inputs.push_back(g.wire_labels[static_cast<std::size_t>(i)].l0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gc::evaluate(g.gc, adder, inputs));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(adder.gates.size()));
}
BENCHMARK(BM_Garble)->Arg(128)->Arg(64)->Arg(8);
BENCHMARK(BM_GarbleEvaluate)->Arg(128)->Arg(8);

void BM_OneShotProtocolRun(benchmark::State& state) {
  protocol::ProtocolParams params;
  params.variant = protocol::Variant::kOneshotTlp;
  params.n = static_cast<int>(state.range(0));
  params.tau_ticks = 4;
  params.hashes_per_tick = 64;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(protocol::run_protocol(params, 0, 1, 1, ++seed));
  }
}
BENCHMARK(BM_OneShotProtocolRun)->DenseRange(4, 8, 2)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
