// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "triage/assign.hpp"
#include "triage/corpus.hpp"
#include "triage/learners.hpp"
#include "triage/random.hpp"
#include "triage/textprep.hpp"
#include "triage/vectorize.hpp"

namespace triage::testing {

inline std::filesystem::path data_dir() { return TRIAGE_TEST_DATA_DIR; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline TokenizedDocument doc(std::vector<std::string> tokens, std::string label = {}, std::string key = {}) {
  TokenizedDocument d;
  d.issue_key = std::move(key);
  d.tokens = std::move(tokens);
  if (!label.empty()) d.label = std::move(label);
  return d;
}

// Dense-ish random dataset: `classes` labels, `dim` features, each vector with
// a handful of positive weights. Every class gets at least `min_per_class`.
inline LabeledDataset random_dataset(Rng& rng, std::size_t n, std::size_t classes, std::size_t dim,
                                     std::size_t min_per_class = 1) {
  std::vector<std::string> terms;
  for (std::size_t t = 0; t < dim; ++t) terms.push_back("t" + std::to_string(1000 + t));
  std::vector<std::uint32_t> df(dim, 1);
  std::vector<TermIndex> selected;
  for (std::size_t t = 0; t < dim; ++t) selected.push_back(static_cast<TermIndex>(t));
  LabeledDataset d;
  d.space = std::make_shared<const FeatureSpace>(terms, df, std::max<std::size_t>(n, 1), selected);
  for (std::size_t c = 0; c < classes; ++c) d.label_set.push_back("c" + std::to_string(c));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<SparseVector::Entry> e;
    const std::size_t nnz = 1 + rng.index(std::min<std::size_t>(dim, 4));
    for (std::size_t k = 0; k < nnz; ++k) {
      e.push_back({static_cast<TermIndex>(rng.index(dim)), 0.05 + rng.uniform() * 2.0});
    }
    d.vectors.push_back(SparseVector::from_unsorted(std::move(e)));
    const int label = i < classes * min_per_class ? static_cast<int>(i % classes)
                                                  : static_cast<int>(rng.index(classes));
    d.labels.push_back(label);
  }
  return d;
}

inline SyntheticSpec noise_free_spec() {
  auto spec = SyntheticSpec::reference_defaults();
  spec.noise_rate = 0.0;
  spec.crosstalk_rate = 0.0;
  return spec;
}

inline std::vector<TokenizedDocument> preprocess_all(const IssueCorpus& corpus,
                                                     const StopwordList& stopwords = StopwordList::rainbow()) {
  std::vector<TokenizedDocument> out;
  out.reserve(corpus.size());
  for (const auto& issue : corpus.issues()) out.push_back(preprocess(issue, stopwords));
  return out;
}

inline std::shared_ptr<const TrainedModel> fit_stage(const ClassifierSpec& spec,
                                                    std::span<const TokenizedDocument> docs, Experiment e) {
  const auto stage = experiment_documents(docs, e);
  return std::make_shared<const TrainedModel>(fit_text_model(spec, stage, experiment_labels(e), {},
                                                             StopwordList::rainbow().fingerprint()));
}

inline AssignmentPipeline flat_pipeline(const ClassifierSpec& spec, std::span<const TokenizedDocument> docs) {
  return AssignmentPipeline::flat(fit_stage(spec, docs, Experiment::E1),
                                  std::make_shared<const StopwordList>(StopwordList::rainbow()));
}

inline AssignmentPipeline chained_pipeline(const ClassifierSpec& spec, std::span<const TokenizedDocument> docs) {
  return AssignmentPipeline::chained(fit_stage(spec, docs, Experiment::E2), fit_stage(spec, docs, Experiment::E3),
                                     fit_stage(spec, docs, Experiment::E4),
                                     std::make_shared<const StopwordList>(StopwordList::rainbow()));
}

}  // namespace triage::testing
