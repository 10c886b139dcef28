#include <benchmark/benchmark.h>

#include "flashguard/harness.hpp"
#include "flashguard/keccak.hpp"

namespace fg = flashguard;
using namespace flashguard;

namespace {

const scenarios::ScenarioSpec& corpus() {
  static const auto c = scenarios::build_benign_corpus(scenarios::default_profiles()[0], 2000, 3);
  return c;
}

const scenarios::ScenarioSpec& ovix() {
  static const auto s = [] {
    for (const auto& p : scenarios::historical_presets())
      if (p.name == "Ovix") return scenarios::build_preset(p, 1);
    throw std::logic_error("missing preset");
  }();
  return s;
}

void BM_Keccak136(benchmark::State& state) {
  std::string input(136, 'a');
  for (auto _ : state) benchmark::DoNotOptimize(keccak256(std::string_view(input)));
}
BENCHMARK(BM_Keccak136);

void BM_ClassifyCorpus(benchmark::State& state) {
  const auto& c = corpus();
  auto db = calldata::SignatureDatabase::builtin();
  const bool prefilter = state.range(0) != 0;
  const auto mode = state.range(1) != 0 ? detector::Mode::Trace : detector::Mode::Scan;
  for (auto _ : state) {
    std::size_t flagged = 0;
    for (const auto& t : c.traffic) {
      if (prefilter && !detector::prefilter(t.tx, db, c.exclusions)) continue;
      flagged += detector::classify(t.tx, db, c.exclusions, mode, &c.genesis).flagged;
    }
    benchmark::DoNotOptimize(flagged);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * c.traffic.size()));
}
BENCHMARK(BM_ClassifyCorpus)
    ->ArgNames({"prefilter", "trace"})
    ->Args({0, 0})
    ->Args({1, 0})
    ->Args({0, 1})
    ->Args({1, 1})
    ->Unit(benchmark::kMillisecond);

void BM_ApplyLargeAttack(benchmark::State& state) {
  const auto& s = ovix();
  const auto& tx = s.attack()->tx;
  for (auto _ : state) benchmark::DoNotOptimize(chainsim::simulate_transaction(s.genesis, tx));
}
BENCHMARK(BM_ApplyLargeAttack)->Unit(benchmark::kMillisecond);

void BM_BuildBlock(benchmark::State& state) {
  const auto& c = corpus();
  std::vector<chainsim::PoolCandidate> pool;
  for (std::size_t i = 0; i < 256 && i < c.traffic.size(); ++i) pool.push_back({c.traffic[i].tx, i});
  for (auto _ : state) benchmark::DoNotOptimize(chainsim::build_block(c.genesis, pool, {}));
}
BENCHMARK(BM_BuildBlock)->Unit(benchmark::kMillisecond);

void BM_ScenarioRun(benchmark::State& state) {
  auto hedgey = scenarios::build_hedgey_scenario();
  harness::RunConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(harness::run_scenario(hedgey, cfg));
}
BENCHMARK(BM_ScenarioRun)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
