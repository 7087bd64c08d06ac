// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <memory>

#include "fixtures.hpp"

namespace triage::bench {
namespace {

std::shared_ptr<const TrainedModel> fit(Experiment e) {
  ClassifierSpec s;
  s.kind = ClassifierKind::naive_bayes_multinomial;
  return std::make_shared<const TrainedModel>(
      fit_text_model(s, stage(e), experiment_labels(e), {}, StopwordList::rainbow().fingerprint()));
}

void BM_AssignFlat(benchmark::State& state) {
  const auto p = AssignmentPipeline::flat(fit(Experiment::E1), std::make_shared<const StopwordList>(StopwordList::rainbow()));
  const auto& issues = corpus().issues();
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(assign(p, issues[i++ % issues.size()]));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AssignFlat);

void BM_AssignChained(benchmark::State& state) {
  const auto p = AssignmentPipeline::chained(fit(Experiment::E2), fit(Experiment::E3), fit(Experiment::E4),
                                             std::make_shared<const StopwordList>(StopwordList::rainbow()));
  const auto& issues = corpus().issues();
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(assign(p, issues[i++ % issues.size()]));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_AssignChained);

}  // namespace
}  // namespace triage::bench
