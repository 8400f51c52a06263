#include <array>

#include <benchmark/benchmark.h>

#include "cefrsimp/orchestrator.hpp"
#include "cefrsimp/predictor.hpp"
#include "cefrsimp/rules.hpp"
#include "cefrsimp/similarity.hpp"
#include "synthetic.hpp"

namespace {

using namespace cefrsimp;

const std::string kSentence =
    "Although the weather forecast predicted heavy rainfall throughout the weekend, approximately "
    "12,000 spectators attended the outdoor festival, which featured numerous international performers.";

void BM_BaseCandidates(benchmark::State& state) {
    const int step = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(base_candidates(kSentence, step));
}
BENCHMARK(BM_BaseCandidates)->Arg(0)->Arg(10);

void BM_EnsemblePredict(benchmark::State& state) {
    const auto ensemble = make_builtin_ensemble();
    for (auto _ : state) benchmark::DoNotOptimize(ensemble.predict(kSentence));
}
BENCHMARK(BM_EnsemblePredict);

void BM_Embed(benchmark::State& state) {
    const HashingEmbedder embedder;
    for (auto _ : state) benchmark::DoNotOptimize(embedder.embed(kSentence));
}
BENCHMARK(BM_Embed);

void BM_ResolveVote(benchmark::State& state) {
    const std::array<HeadVote, 3> votes{HeadVote{CefrLevel::kA2, 0.6}, HeadVote{CefrLevel::kB1, 0.6},
                                        HeadVote{CefrLevel::kC1, 0.5}};
    for (auto _ : state) benchmark::DoNotOptimize(resolve_vote(votes));
}
BENCHMARK(BM_ResolveVote);

void BM_PipelineRule(benchmark::State& state) {
    const auto corpus = testing::make_synthetic_corpus(static_cast<std::size_t>(state.range(0)), 1);
    const auto scorers = builtin_scorers();
    const PipelineConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(corpus.tasks, cfg, scorers, 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PipelineRule)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
