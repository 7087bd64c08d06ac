// SPDX-License-Identifier: Apache-2.0
#include "triage/assign.hpp"

#include <algorithm>
#include <chrono>

#include "triage/error.hpp"

namespace triage {

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::E1: return "E1";
    case Experiment::E2: return "E2";
    case Experiment::E3: return "E3";
    case Experiment::E4: return "E4";
  }
  return "E1";
}

std::optional<Experiment> parse_experiment(std::string_view name) {
  for (auto e : {Experiment::E1, Experiment::E2, Experiment::E3, Experiment::E4}) {
    if (to_string(e) == name) return e;
  }
  return std::nullopt;
}

std::vector<std::string> experiment_labels(Experiment e) {
  const auto& tax = Taxonomy::standard();
  switch (e) {
    case Experiment::E1: return tax.subteams();
    case Experiment::E2: return tax.teams();
    case Experiment::E3: return tax.subteams_of(tax.teams()[0]);
    case Experiment::E4: return tax.subteams_of(tax.teams()[1]);
  }
  return {};
}

std::vector<TokenizedDocument> experiment_documents(std::span<const TokenizedDocument> docs,
                                                    Experiment e) {
  const auto& tax = Taxonomy::standard();
  std::vector<TokenizedDocument> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) {
    if (!doc.label) throw ValidationError("document '" + doc.issue_key + "' has no label");
    const std::string& team = tax.team_of(*doc.label);
    switch (e) {
      case Experiment::E1:
        out.push_back(doc);
        break;
      case Experiment::E2:
        out.push_back(doc);
        out.back().label = team;
        break;
      case Experiment::E3:
        if (team == tax.teams()[0]) out.push_back(doc);
        break;
      case Experiment::E4:
        if (team == tax.teams()[1]) out.push_back(doc);
        break;
    }
  }
  return out;
}

namespace {

// Restricts vectors to the selected features; tf-idf weights of the kept
// terms do not change.
void restrict_to(LabeledDataset& data, std::shared_ptr<const FeatureSpace> space) {
  for (auto& v : data.vectors) {
    std::vector<SparseVector::Entry> kept;
    kept.reserve(v.nnz());
    for (const auto& e : v) {
      if (space->is_selected(e.index)) kept.push_back(e);
    }
    v = SparseVector::from_unsorted(std::move(kept));
  }
  data.space = std::move(space);
}

}  // namespace

TrainedModel fit_text_model(const ClassifierSpec& spec, std::span<const TokenizedDocument> docs,
                            const std::vector<std::string>& label_set,
                            const TextModelOptions& options, std::uint64_t stopword_fingerprint) {
  spec.validate();
  options.resample.validate();
  if (docs.empty()) throw ValidationError("no training documents");
  auto space = std::make_shared<const FeatureSpace>(build_space(docs));
  LabeledDataset data = make_dataset(docs, space, label_set);
  if (options.select_features) {
    restrict_to(data, std::make_shared<const FeatureSpace>(
                          info_gain_select(data, options.ig_threshold)));
  }
  if (options.resample.method != ResampleMethod::none) data = resample(data, options.resample);
  TrainedModel model = train(spec, data);
  model.stopword_fingerprint = stopword_fingerprint;
  return model;
}

std::string_view to_string(Strategy s) { return s == Strategy::S1 ? "S1" : "S2"; }

std::optional<Strategy> parse_strategy(std::string_view name) {
  if (name == "S1") return Strategy::S1;
  if (name == "S2") return Strategy::S2;
  return std::nullopt;
}

namespace {

void require_labels(const AssignmentPipeline::ModelPtr& model, std::vector<std::string> expected,
                    const std::string& role) {
  if (!model) throw ValidationError(role + " model is missing");
  auto got = model->label_set();
  std::sort(got.begin(), got.end());
  std::sort(expected.begin(), expected.end());
  if (got != expected) {
    std::string want;
    for (const auto& l : expected) want += (want.empty() ? "" : ",") + l;
    throw ValidationError(role + " model must have labels {" + want + "}");
  }
}

void require_stopwords(const AssignmentPipeline::ModelPtr& model, const StopwordList& stopwords) {
  if (model->stopword_fingerprint != 0 && model->stopword_fingerprint != stopwords.fingerprint()) {
    throw ValidationError("model was built with a different stopword list");
  }
}

std::size_t label_index(const TrainedModel& model, std::string_view label) {
  const auto& ls = model.label_set();
  return static_cast<std::size_t>(std::find(ls.begin(), ls.end(), label) - ls.begin());
}

}  // namespace

AssignmentPipeline AssignmentPipeline::flat(ModelPtr model,
                                            std::shared_ptr<const StopwordList> stopwords,
                                            std::vector<std::string> model_ids) {
  if (!stopwords) throw ValidationError("pipeline needs a stopword list");
  require_labels(model, Taxonomy::standard().subteams(), "flat");
  require_stopwords(model, *stopwords);
  AssignmentPipeline p;
  p.strategy_ = Strategy::S1;
  p.flat_ = std::move(model);
  p.stopwords_ = std::move(stopwords);
  p.model_ids_ = std::move(model_ids);
  return p;
}

AssignmentPipeline AssignmentPipeline::chained(ModelPtr team_model, ModelPtr team_a_model,
                                               ModelPtr team_b_model,
                                               std::shared_ptr<const StopwordList> stopwords,
                                               std::vector<std::string> model_ids) {
  if (!stopwords) throw ValidationError("pipeline needs a stopword list");
  const auto& tax = Taxonomy::standard();
  const auto& ta = tax.teams()[0];
  const auto& tb = tax.teams()[1];
  require_labels(team_model, tax.teams(), "team");
  require_labels(team_a_model, tax.subteams_of(ta), ta);
  require_labels(team_b_model, tax.subteams_of(tb), tb);
  for (const auto* m : {&team_model, &team_a_model, &team_b_model}) require_stopwords(*m, *stopwords);
  AssignmentPipeline p;
  p.strategy_ = Strategy::S2;
  p.team_ = std::move(team_model);
  p.subteam_.emplace(ta, std::move(team_a_model));
  p.subteam_.emplace(tb, std::move(team_b_model));
  p.stopwords_ = std::move(stopwords);
  p.model_ids_ = std::move(model_ids);
  return p;
}

const TrainedModel& AssignmentPipeline::flat_model() const {
  if (!flat_) throw ValidationError("S2 pipeline has no flat model");
  return *flat_;
}

const TrainedModel& AssignmentPipeline::team_model() const {
  if (!team_) throw ValidationError("S1 pipeline has no team model");
  return *team_;
}

const TrainedModel& AssignmentPipeline::subteam_model(std::string_view team) const {
  auto it = subteam_.find(team);
  if (it == subteam_.end()) throw ValidationError("no sub-team model for '" + std::string(team) + "'");
  return *it->second;
}

AssignmentResult assign(const AssignmentPipeline& pipeline, std::string_view key,
                        std::string_view summary, std::string_view description) {
  const auto started = std::chrono::steady_clock::now();
  const auto& tax = pipeline.taxonomy();
  const TokenizedDocument doc = preprocess(key, summary, description, pipeline.stopwords());

  AssignmentResult r;
  r.issue_key = std::string(key);
  r.model_ids = pipeline.model_ids();
  r.low_evidence = doc.tokens.empty();

  if (pipeline.strategy() == Strategy::S1) {
    const auto& model = pipeline.flat_model();
    const Distribution d = model.predict(tfidf(doc, model.space()));
    const std::size_t best = d.argmax();
    r.subteam = model.label_set()[best];
    r.subteam_confidence = d.scores[best];
    r.team = tax.team_of(r.subteam);
    for (const auto& st : tax.subteams_of(r.team)) r.team_confidence += d.scores[label_index(model, st)];
    r.team_confidence = std::min(1.0, r.team_confidence);
  } else {
    const auto& team_model = pipeline.team_model();
    const Distribution dt = team_model.predict(tfidf(doc, team_model.space()));
    r.team = team_model.label_set()[dt.argmax()];
    r.team_confidence = dt.max();
    const auto& sub = pipeline.subteam_model(r.team);
    const Distribution ds = sub.predict(tfidf(doc, sub.space()));
    r.subteam = sub.label_set()[ds.argmax()];
    r.subteam_confidence = ds.max();
  }
  r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started)
                     .count();
  return r;
}

AssignmentResult assign(const AssignmentPipeline& pipeline, const IssueRecord& issue) {
  return assign(pipeline, issue.key, issue.summary, issue.description);
}

namespace {

void require_fraction(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(std::string(name) + " must be in [0, 1]", {{name, "must be in [0, 1]"}});
  }
}

}  // namespace

double chained_accuracy(double acc_team, double acc_sub_a, double acc_sub_b) {
  require_fraction(acc_team, "acc_team");
  require_fraction(acc_sub_a, "acc_sub_a");
  require_fraction(acc_sub_b, "acc_sub_b");
  return (acc_team * 0.5) * (acc_sub_a + acc_sub_b);
}

double chained_accuracy_weighted(double acc_team, double acc_sub_a, double acc_sub_b,
                                 double prior_a) {
  require_fraction(acc_team, "acc_team");
  require_fraction(acc_sub_a, "acc_sub_a");
  require_fraction(acc_sub_b, "acc_sub_b");
  require_fraction(prior_a, "prior_a");
  return acc_team * (prior_a * acc_sub_a + (1.0 - prior_a) * acc_sub_b);
}

ChainMeasurement measure_chain(const AssignmentPipeline& pipeline,
                               std::span<const IssueRecord> test) {
  if (test.empty()) throw ValidationError("test set is empty");
  const auto& tax = pipeline.taxonomy();
  ChainMeasurement m;
  std::size_t hits = 0, team_hits = 0;
  for (const auto& issue : test) {
    if (!issue.subteam) throw ValidationError("test issue '" + issue.key + "' is unlabeled");
    const auto r = assign(pipeline, issue);
    if (r.subteam == *issue.subteam) ++hits;
    if (r.team == tax.team_of(*issue.subteam)) ++team_hits;
  }
  m.n = test.size();
  m.accuracy = static_cast<double>(hits) / static_cast<double>(m.n);
  m.team_accuracy = static_cast<double>(team_hits) / static_cast<double>(m.n);
  return m;
}

double measured_chain_accuracy(const AssignmentPipeline& pipeline,
                               std::span<const IssueRecord> test) {
  return measure_chain(pipeline, test).accuracy;
}

}  // namespace triage
