// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "triage/corpus.hpp"
#include "triage/learners.hpp"
#include "triage/resample.hpp"
#include "triage/textprep.hpp"

namespace triage {

// Labelings used by the experiments:
//   E1 all issues, six sub-team labels     E2 all issues, team labels
//   E3 T_A issues, sub-team labels         E4 T_B issues, sub-team labels
enum class Experiment { E1, E2, E3, E4 };

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view name);
std::vector<std::string> experiment_labels(Experiment e);

// Relabels (and filters) labeled documents whose label is a sub-team.
std::vector<TokenizedDocument> experiment_documents(std::span<const TokenizedDocument> docs,
                                                    Experiment e);

// Options for turning labeled token documents into a fitted model.
struct TextModelOptions {
  bool select_features = true;
  double ig_threshold = 0.0;
  ResampleSpec resample;
};

// build_space -> tfidf -> info_gain_select (training data only) -> resample -> train.
// Every doc must carry a label from label_set.
TrainedModel fit_text_model(const ClassifierSpec& spec, std::span<const TokenizedDocument> docs,
                            const std::vector<std::string>& label_set,
                            const TextModelOptions& options = {},
                            std::uint64_t stopword_fingerprint = 0);

enum class Strategy { S1, S2 };
std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view name);

struct AssignmentResult {
  std::string issue_key;
  std::string team;
  std::string subteam;
  double team_confidence = 0.0;
  double subteam_confidence = 0.0;
  std::vector<std::string> model_ids;
  double latency_ms = 0.0;
  // No token survived preprocessing; the answer comes from learner priors.
  bool low_evidence = false;
};

// A deployed strategy. S1 holds one six-label model; S2 a team model plus one
// sub-team model per team. Immutable; share freely between threads.
class AssignmentPipeline {
 public:
  using ModelPtr = std::shared_ptr<const TrainedModel>;

  // Throws ValidationError when a model's label set does not match its role or
  // the models were built with different stopword lists.
  static AssignmentPipeline flat(ModelPtr model, std::shared_ptr<const StopwordList> stopwords,
                                 std::vector<std::string> model_ids = {});
  static AssignmentPipeline chained(ModelPtr team_model, ModelPtr team_a_model,
                                    ModelPtr team_b_model,
                                    std::shared_ptr<const StopwordList> stopwords,
                                    std::vector<std::string> model_ids = {});

  Strategy strategy() const { return strategy_; }
  const Taxonomy& taxonomy() const { return Taxonomy::standard(); }
  const StopwordList& stopwords() const { return *stopwords_; }
  const std::vector<std::string>& model_ids() const { return model_ids_; }

  const TrainedModel& flat_model() const;
  const TrainedModel& team_model() const;
  const TrainedModel& subteam_model(std::string_view team) const;

 private:
  AssignmentPipeline() = default;

  Strategy strategy_ = Strategy::S1;
  ModelPtr flat_;
  ModelPtr team_;
  std::map<std::string, ModelPtr, std::less<>> subteam_;
  std::shared_ptr<const StopwordList> stopwords_;
  std::vector<std::string> model_ids_;
};

AssignmentResult assign(const AssignmentPipeline& pipeline, const IssueRecord& issue);
AssignmentResult assign(const AssignmentPipeline& pipeline, std::string_view key,
                        std::string_view summary, std::string_view description);

// [acc_team * 0.5] * [acc_sub_a + acc_sub_b]. Throws ValidationError for inputs
// outside [0, 1].
double chained_accuracy(double acc_team, double acc_sub_a, double acc_sub_b);
// acc_team * (prior_a * acc_sub_a + (1 - prior_a) * acc_sub_b)
double chained_accuracy_weighted(double acc_team, double acc_sub_a, double acc_sub_b,
                                 double prior_a);

struct ChainMeasurement {
  std::size_t n = 0;
  double accuracy = 0.0;       // end-to-end sub-team hits / n
  double team_accuracy = 0.0;  // team hits / n
};

// Test issues must carry a sub-team label. Throws ValidationError when empty.
ChainMeasurement measure_chain(const AssignmentPipeline& pipeline,
                               std::span<const IssueRecord> test);
double measured_chain_accuracy(const AssignmentPipeline& pipeline,
                               std::span<const IssueRecord> test);

}  // namespace triage
