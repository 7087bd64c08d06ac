// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "triage/error.hpp"
#include "triage/service/service.hpp"

namespace triage::service {

TrainingRequest parse_training_request(const json& j) {
  schema::Reader r;
  TrainingRequest req;
  if (!j.is_object()) {
    r.fail("", "training request must be a JSON object");
    r.finish("invalid training request");
  }
  r.known_fields(j, {"dataset", "strategy", "classifiers", "classifier", "text", "folds", "repeats",
                     "seed", "window", "activate"});

  if (j.contains("dataset")) {
    schema::Reader sub = r.nested("dataset");
    req.dataset = schema::dataset_from_json(j["dataset"], sub);
    r.merge(sub);
  }
  if (auto s = r.string(j, "strategy")) {
    if (auto st = parse_strategy(*s)) {
      req.strategy = *st;
    } else {
      r.fail("strategy", "must be S1 or S2");
    }
  }
  if (j.contains("classifier") && j.contains("classifiers")) {
    r.fail("classifiers", "give classifier or classifiers, not both");
  }
  auto read_classifier = [&](const json& c, const std::string& field) {
    schema::Reader sub = r.nested(field);
    req.classifiers.push_back(schema::classifier_from_json(c, sub));
    r.merge(sub);
  };
  if (j.contains("classifier")) read_classifier(j["classifier"], "classifier");
  if (j.contains("classifiers")) {
    const auto& cs = j["classifiers"];
    if (!cs.is_array() || cs.empty()) {
      r.fail("classifiers", "must be a non-empty array");
    } else {
      for (std::size_t i = 0; i < cs.size(); ++i) {
        read_classifier(cs[i], "classifiers[" + std::to_string(i) + "]");
      }
    }
  }
  if (req.classifiers.empty() && r.ok()) {
    req.classifiers.push_back(ClassifierSpec{ClassifierKind::naive_bayes_multinomial, {}, 1});
  }
  if (j.contains("text")) {
    schema::Reader sub = r.nested("text");
    req.text = schema::text_options_from_json(j["text"], sub);
    r.merge(sub);
  }
  if (auto v = r.integer(j, "folds")) {
    if (*v < 2 || *v > 100) r.fail("folds", "must be between 2 and 100");
    req.folds = static_cast<int>(*v);
  }
  if (auto v = r.integer(j, "repeats")) {
    if (*v < 1 || *v > 100) r.fail("repeats", "must be between 1 and 100");
    req.repeats = static_cast<int>(*v);
  }
  if (auto v = r.integer(j, "seed")) {
    if (*v < 0) r.fail("seed", "must be non-negative");
    req.seed = static_cast<std::uint64_t>(*v);
  }
  if (j.contains("window") && !j["window"].is_null()) {
    schema::Reader sub = r.nested("window");
    req.window = schema::window_from_json(j["window"], sub);
    r.merge(sub);
  }
  if (auto b = r.boolean(j, "activate")) req.activate = *b;
  r.finish("invalid training request");
  return req;
}

namespace {

struct Stage {
  std::string name;
  Experiment experiment;
};

std::vector<Stage> stages_of(Strategy s) {
  if (s == Strategy::S1) return {{"flat", Experiment::E1}};
  const auto& teams = Taxonomy::standard().teams();
  return {{"team", Experiment::E2}, {teams[0], Experiment::E3}, {teams[1], Experiment::E4}};
}

}  // namespace

TrainingOutcome run_training(const TrainingRequest& request, ModelRegistry& registry,
                             const StopwordList& stopwords) {
  IngestResult ingested = schema::load_dataset(request.dataset);
  const IssueCorpus& corpus = ingested.corpus;
  if (corpus.empty()) throw ValidationError("dataset has no usable issues");

  auto [begin, end] = corpus.span();
  if (request.window) {
    request.window->validate();
    const Timestamp from = end - request.window->training_window;
    begin = std::max(begin, from);
  }

  std::vector<TokenizedDocument> docs;
  for (const auto& issue : corpus.issues()) {
    if (issue.created < begin) continue;
    docs.push_back(preprocess(issue, stopwords));
  }
  if (docs.empty()) throw ValidationError("training window holds no issues");

  CrossValidationOptions cv;
  cv.folds = request.folds;
  cv.repeats = request.repeats;
  cv.seed = request.seed;
  cv.text = request.text;

  TrainingOutcome out;
  json stages = json::array();
  for (const auto& stage : stages_of(request.strategy)) {
    const auto labels = experiment_labels(stage.experiment);
    const auto stage_docs = experiment_documents(docs, stage.experiment);

    std::optional<EvaluationReport> best;
    std::optional<ClassifierSpec> best_spec;
    json candidates = json::array();
    for (const auto& spec : request.classifiers) {
      if (spec.kind == ClassifierKind::sgd_text && labels.size() != 2) {
        candidates.push_back({{"classifier", spec.describe()}, {"skipped", "binary-only classifier"}});
        continue;
      }
      auto report = cross_validate(spec, stage_docs, labels, cv);
      candidates.push_back({{"classifier", report.classifier},
                            {"mean_accuracy", report.mean_accuracy},
                            {"std_accuracy", report.std_accuracy}});
      if (!best || report.mean_accuracy > best->mean_accuracy) {
        best = std::move(report);
        best_spec = spec;
      }
    }
    if (!best) {
      throw ValidationError("no candidate classifier applies to stage " + stage.name,
                            {{"classifiers", "no applicable classifier for stage " + stage.name}});
    }

    TrainedModel model = fit_text_model(*best_spec, stage_docs, labels, request.text, stopwords.fingerprint());
    model.training_window = std::pair{begin, end};
    const ModelEntry entry = registry.add(std::move(model), &*best, stage.name);
    out.model_ids.push_back(entry.model_id);
    out.report_ids.push_back(entry.report_id);
    stages.push_back({{"stage", stage.name},
                      {"experiment", to_string(stage.experiment)},
                      {"instances", stage_docs.size()},
                      {"model_id", entry.model_id},
                      {"classifier", entry.classifier},
                      {"mean_accuracy", best->mean_accuracy},
                      {"candidates", std::move(candidates)}});
  }
  out.summary = {{"strategy", to_string(request.strategy)},
                 {"ingest", schema::to_json(ingested.report)},
                 {"training_window",
                  {{"begin", format_iso8601(begin)}, {"end", format_iso8601(end)}}},
                 {"stages", std::move(stages)},
                 {"model_ids", out.model_ids}};
  return out;
}

}  // namespace triage::service
