#include <benchmark/benchmark.h>

#include "readerpanel/tournament.hpp"

namespace readerpanel {
namespace {

void BM_SwissPairing(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("c" + std::to_string(i));
  std::set<std::pair<std::string, std::string>> played;
  // A dense history: every entrant has already met its four nearest ranks.
  for (int i = 0; i < n; ++i) {
    for (int d = 1; d <= 4 && i + d < n; ++d) played.emplace(std::min(ids[i], ids[i + d]), std::max(ids[i], ids[i + d]));
  }
  for (auto _ : state) benchmark::DoNotOptimize(pair_swiss_round(ids, played));
}
BENCHMARK(BM_SwissPairing)->RangeMultiplier(2)->Range(8, 128);

void BM_BuildDoubleElim(benchmark::State& state) {
  std::vector<std::string> ids;
  for (int i = 0; i < state.range(0); ++i) ids.push_back("c" + std::to_string(i));
  for (auto _ : state) benchmark::DoNotOptimize(build_bracket(TournamentFormat::double_elim, ids, {}));
}
BENCHMARK(BM_BuildDoubleElim)->RangeMultiplier(2)->Range(8, 256);

void BM_MockTournament(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto concepts = synthetic_concepts(n, 1);
  TournamentConfig config;
  config.imprint = "nimble_ultra";
  config.seed = 1;
  config.concurrency = 1;
  auto panel = compose_and_repair(ImprintRegistry::shipped().find("nimble_ultra"), 10, PublisherRegistry::shipped(), 1);
  MockJudge judge(1);
  for (auto _ : state) benchmark::DoNotOptimize(run_tournament(concepts, config, panel, judge, default_rubric()));
  state.counters["matches"] = n - 1;
}
BENCHMARK(BM_MockTournament)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace readerpanel
