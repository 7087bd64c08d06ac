// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "triage/vectorize.hpp"

namespace triage::bench {
namespace {

void BM_BuildSpace(benchmark::State& state) {
  const auto& docs = documents();
  for (auto _ : state) benchmark::DoNotOptimize(build_space(docs));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(docs.size()));
}
BENCHMARK(BM_BuildSpace)->Unit(benchmark::kMillisecond);

void BM_Tfidf(benchmark::State& state) {
  const auto& docs = documents();
  const auto space = build_space(docs);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(tfidf(docs[i++ % docs.size()], space));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Tfidf);

void BM_InfoGainSelect(benchmark::State& state) {
  const auto docs = stage(Experiment::E1);
  const auto space = std::make_shared<const FeatureSpace>(build_space(docs));
  const auto data = make_dataset(docs, space, experiment_labels(Experiment::E1));
  for (auto _ : state) benchmark::DoNotOptimize(info_gain_select(data));
}
BENCHMARK(BM_InfoGainSelect)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace triage::bench
