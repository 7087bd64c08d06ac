// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "triage/assign.hpp"
#include "triage/corpus.hpp"
#include "triage/textprep.hpp"

namespace triage::bench {

inline const IssueCorpus& corpus() {
  static const IssueCorpus c = generate_synthetic(SyntheticSpec::reference_defaults(), 42);
  return c;
}

inline const std::vector<TokenizedDocument>& documents() {
  static const auto docs = [] {
    std::vector<TokenizedDocument> out;
    for (const auto& issue : corpus().issues()) out.push_back(preprocess(issue, StopwordList::rainbow()));
    return out;
  }();
  return docs;
}

inline std::vector<TokenizedDocument> stage(Experiment e) { return experiment_documents(documents(), e); }

}  // namespace triage::bench
