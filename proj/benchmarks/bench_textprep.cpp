// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "fixtures.hpp"

namespace triage::bench {
namespace {

void BM_LovinsStem(benchmark::State& state) {
  const std::vector<std::string> words{"nationally", "sitting",   "connections", "absorption", "configuration",
                                       "rubbing",    "databases", "timeouts",    "login",      "deployment"};
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(lovins_stem(words[i++ % words.size()]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LovinsStem);

void BM_Clean(benchmark::State& state) {
  const std::string text =
      "<p>Erro na <b>conexão</b> com o banco 0x1F após 3.5 segundos; usuário não consegue fazer login.</p>";
  for (auto _ : state) benchmark::DoNotOptimize(clean(text));
  state.SetBytesProcessed(state.iterations() * static_cast<long>(text.size()));
}
BENCHMARK(BM_Clean);

void BM_PreprocessIssue(benchmark::State& state) {
  const auto& issues = corpus().issues();
  const auto& sw = StopwordList::rainbow();
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(preprocess(issues[i++ % issues.size()], sw));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PreprocessIssue);

}  // namespace
}  // namespace triage::bench
