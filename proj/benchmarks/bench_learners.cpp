// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "fixtures.hpp"
#include "triage/learners.hpp"

namespace triage::bench {
namespace {

ClassifierSpec spec_of(ClassifierKind kind) {
  ClassifierSpec s;
  s.kind = kind;
  s.params.threads = 1;
  s.params.trees = 20;
  return s;
}

void BM_FitTextModel(benchmark::State& state) {
  const auto kind = static_cast<ClassifierKind>(state.range(0));
  const auto docs = stage(Experiment::E1);
  const auto labels = experiment_labels(Experiment::E1);
  for (auto _ : state) benchmark::DoNotOptimize(fit_text_model(spec_of(kind), docs, labels));
  state.SetLabel(std::string(to_string(kind)));
}
BENCHMARK(BM_FitTextModel)
    ->Arg(static_cast<int>(ClassifierKind::naive_bayes_multinomial))
    ->Arg(static_cast<int>(ClassifierKind::knn))
    ->Arg(static_cast<int>(ClassifierKind::logistic_regression))
    ->Arg(static_cast<int>(ClassifierKind::random_forest))
    ->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const auto kind = static_cast<ClassifierKind>(state.range(0));
  const auto docs = stage(Experiment::E1);
  const auto model = fit_text_model(spec_of(kind), docs, experiment_labels(Experiment::E1));
  std::vector<SparseVector> vectors;
  for (std::size_t i = 0; i < docs.size(); i += 7) vectors.push_back(tfidf(docs[i], model.space()));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(vectors[i++ % vectors.size()]));
  state.SetLabel(std::string(to_string(kind)));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Predict)
    ->Arg(static_cast<int>(ClassifierKind::naive_bayes_multinomial))
    ->Arg(static_cast<int>(ClassifierKind::knn))
    ->Arg(static_cast<int>(ClassifierKind::logistic_regression))
    ->Arg(static_cast<int>(ClassifierKind::random_forest));

void BM_ArtifactRoundTrip(benchmark::State& state) {
  const auto docs = stage(Experiment::E1);
  const auto model = fit_text_model(spec_of(ClassifierKind::naive_bayes_multinomial), docs,
                                    experiment_labels(Experiment::E1));
  for (auto _ : state) benchmark::DoNotOptimize(load_model(save_model(model)));
}
BENCHMARK(BM_ArtifactRoundTrip)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace triage::bench
