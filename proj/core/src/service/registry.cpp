// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "triage/error.hpp"
#include "triage/service/service.hpp"

namespace triage::service {

namespace {

constexpr const char* kModels = "models";
constexpr const char* kReports = "reports";

Timestamp seconds_to_time(std::int64_t s) { return Timestamp(std::chrono::seconds(s)); }

}  // namespace

json to_json(const ModelEntry& e) {
  json j{{"model_id", e.model_id},
         {"artifact", e.artifact},
         {"classifier", e.classifier},
         {"stage", e.stage},
         {"label_set", e.label_set},
         {"report_id", e.report_id},
         {"created_at", format_iso8601(e.created_at)},
         {"created_at_epoch", e.created_at.time_since_epoch().count()}};
  if (e.training_window) {
    j["training_window"] = {{"begin", format_iso8601(e.training_window->first)},
                            {"end", format_iso8601(e.training_window->second)}};
  } else {
    j["training_window"] = nullptr;
  }
  return j;
}

ModelEntry entry_from_json(const json& j) {
  ModelEntry e;
  e.model_id = j.at("model_id").get<std::string>();
  e.artifact = j.at("artifact").get<std::string>();
  e.classifier = j.at("classifier").get<std::string>();
  e.stage = j.value("stage", "");
  e.label_set = j.at("label_set").get<std::vector<std::string>>();
  e.report_id = j.value("report_id", "");
  e.created_at = seconds_to_time(j.at("created_at_epoch").get<std::int64_t>());
  if (const auto& w = j.at("training_window"); w.is_object()) {
    auto b = parse_iso8601(w.at("begin").get<std::string>());
    auto en = parse_iso8601(w.at("end").get<std::string>());
    if (b && en) e.training_window = std::pair{*b, *en};
  }
  return e;
}

ModelRegistry::ModelRegistry(BlobStore& blobs, DocumentStore& docs) : blobs_(blobs), docs_(docs) {}

ModelEntry ModelRegistry::add(TrainedModel model, const EvaluationReport* report, std::string stage) {
  ModelEntry e;
  e.model_id = new_id("mdl");
  e.artifact = e.model_id + ".trgmodel";
  e.classifier = model.spec().describe();
  e.stage = std::move(stage);
  e.label_set = model.label_set();
  e.training_window = model.training_window;
  e.created_at = now_seconds();
  if (report) {
    e.report_id = e.model_id;
    model.metrics_ref = e.report_id;
  }
  const std::string bytes = save_model(model);

  std::unique_lock lock(mutex_);
  blobs_.put(e.artifact, bytes);
  if (report) docs_.put(kReports, e.report_id, schema::to_json(*report));
  // The entry goes last: a listed model always has its artifact and report.
  docs_.put(kModels, e.model_id, to_json(e));
  cache_[e.model_id] = std::make_shared<const TrainedModel>(std::move(model));
  return e;
}

std::vector<ModelEntry> ModelRegistry::list() const {
  std::shared_lock lock(mutex_);
  std::vector<ModelEntry> out;
  for (const auto& doc : docs_.list(kModels)) out.push_back(entry_from_json(doc));
  std::stable_sort(out.begin(), out.end(), [](const ModelEntry& a, const ModelEntry& b) {
    return a.created_at != b.created_at ? a.created_at < b.created_at : a.model_id < b.model_id;
  });
  return out;
}

std::optional<ModelEntry> ModelRegistry::find(const std::string& model_id) const {
  if (!is_safe_id(model_id)) return std::nullopt;
  std::shared_lock lock(mutex_);
  auto doc = docs_.get(kModels, model_id);
  if (!doc) return std::nullopt;
  return entry_from_json(*doc);
}

std::shared_ptr<const TrainedModel> ModelRegistry::load(const std::string& model_id) const {
  {
    std::shared_lock lock(mutex_);
    if (auto it = cache_.find(model_id); it != cache_.end()) return it->second;
  }
  auto entry = find(model_id);
  if (!entry) throw NotFoundError("unknown model '" + model_id + "'");
  auto bytes = blobs_.get(entry->artifact);
  if (!bytes) throw NotFoundError("artifact for model '" + model_id + "' is missing");
  auto model = std::make_shared<const TrainedModel>(load_model(*bytes));
  std::unique_lock lock(mutex_);
  return cache_.emplace(model_id, std::move(model)).first->second;
}

json ModelRegistry::report_json(const std::string& model_id) const {
  auto entry = find(model_id);
  if (!entry) throw NotFoundError("unknown model '" + model_id + "'");
  if (entry->report_id.empty()) throw NotFoundError("model '" + model_id + "' has no report");
  std::shared_lock lock(mutex_);
  auto doc = docs_.get(kReports, entry->report_id);
  if (!doc) throw NotFoundError("report '" + entry->report_id + "' is missing");
  return *doc;
}

EvaluationReport ModelRegistry::report(const std::string& model_id) const {
  return schema::report_from_json(report_json(model_id));
}

// --- deployment ----------------------------------------------------------------------------------

json to_json(const Deployment& d) {
  return {{"version", d.version},
          {"strategy", to_string(d.strategy)},
          {"model_ids", d.model_ids},
          {"activated_at", format_iso8601(d.activated_at)},
          {"activated_at_epoch", d.activated_at.time_since_epoch().count()}};
}

DeploymentManager::DeploymentManager(ModelRegistry& registry, DocumentStore& docs,
                                     std::shared_ptr<const StopwordList> stopwords)
    : registry_(registry), docs_(docs), stopwords_(std::move(stopwords)) {}

std::shared_ptr<const ActiveSnapshot> DeploymentManager::build(Strategy strategy,
                                                               std::vector<std::string> model_ids,
                                                               std::uint64_t version,
                                                               Timestamp activated_at) const {
  const auto& tax = Taxonomy::standard();
  std::vector<AssignmentPipeline::ModelPtr> models;
  for (const auto& id : model_ids) models.push_back(registry_.load(id));

  auto labels_of = [](const AssignmentPipeline::ModelPtr& m) {
    auto ls = m->label_set();
    std::sort(ls.begin(), ls.end());
    return ls;
  };
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };

  Deployment d;
  d.version = version;
  d.strategy = strategy;
  d.activated_at = activated_at;
  if (strategy == Strategy::S1) {
    if (models.size() != 1) {
      throw ValidationError("S1 deployment takes exactly one model id",
                            {{"model_ids", "S1 takes exactly one model id"}});
    }
    d.model_ids = model_ids;
    auto pipeline = AssignmentPipeline::flat(models[0], stopwords_, d.model_ids);
    return std::make_shared<const ActiveSnapshot>(ActiveSnapshot{std::move(d), std::move(pipeline)});
  }
  if (models.size() != 3) {
    throw ValidationError("S2 deployment takes three model ids (team, T_A, T_B)",
                          {{"model_ids", "S2 takes three model ids: a team model and one per team"}});
  }
  const std::vector<std::vector<std::string>> roles{sorted(tax.teams()),
                                                    sorted(tax.subteams_of(tax.teams()[0])),
                                                    sorted(tax.subteams_of(tax.teams()[1]))};
  std::vector<int> slot(3, -1);
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto ls = labels_of(models[i]);
    for (std::size_t r = 0; r < roles.size(); ++r) {
      if (ls == roles[r] && slot[r] < 0) {
        slot[r] = static_cast<int>(i);
        break;
      }
    }
  }
  static const char* kRoleNames[] = {"team", "T_A sub-team", "T_B sub-team"};
  std::vector<ValidationError::Field> missing;
  for (std::size_t r = 0; r < 3; ++r) {
    if (slot[r] < 0) missing.push_back({"model_ids", std::string("no ") + kRoleNames[r] + " model"});
  }
  if (!missing.empty()) throw ValidationError("models do not form an S2 pipeline", std::move(missing));
  for (int s : slot) d.model_ids.push_back(model_ids[static_cast<std::size_t>(s)]);
  auto pipeline = AssignmentPipeline::chained(models[static_cast<std::size_t>(slot[0])],
                                              models[static_cast<std::size_t>(slot[1])],
                                              models[static_cast<std::size_t>(slot[2])], stopwords_,
                                              d.model_ids);
  return std::make_shared<const ActiveSnapshot>(ActiveSnapshot{std::move(d), std::move(pipeline)});
}

void DeploymentManager::restore() {
  std::lock_guard lock(write_mutex_);
  auto doc = docs_.get("deployment", "active");
  if (!doc) return;
  const auto strategy = parse_strategy(doc->at("strategy").get<std::string>());
  if (!strategy) throw ValidationError("persisted deployment has an unknown strategy");
  auto snap = build(*strategy, doc->at("model_ids").get<std::vector<std::string>>(),
                    doc->at("version").get<std::uint64_t>(),
                    Timestamp(std::chrono::seconds(doc->at("activated_at_epoch").get<std::int64_t>())));
  std::atomic_store(&active_, std::move(snap));
}

std::shared_ptr<const ActiveSnapshot> DeploymentManager::activate(Strategy strategy,
                                                                  std::vector<std::string> model_ids) {
  std::lock_guard lock(write_mutex_);
  const auto previous = std::atomic_load(&active_);
  const std::uint64_t version = previous ? previous->deployment.version + 1 : 1;
  auto snap = build(strategy, std::move(model_ids), version, now_seconds());
  docs_.put("deployment", "active", to_json(snap->deployment));
  std::atomic_store(&active_, snap);
  return snap;
}

std::shared_ptr<const ActiveSnapshot> DeploymentManager::current() const {
  return std::atomic_load(&active_);
}

}  // namespace triage::service
