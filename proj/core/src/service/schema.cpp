// SPDX-License-Identifier: Apache-2.0
#include "triage/service/schema.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "triage/error.hpp"
#include "triage/timeutil.hpp"

namespace triage::schema {

// --- Reader ----------------------------------------------------------------------------

void Reader::fail(const std::string& field, const std::string& message) {
  errors_.push_back({path(field), message});
}

std::string Reader::path(const std::string& field) const {
  if (prefix_.empty()) return field;
  if (field.empty()) return prefix_;
  return prefix_ + "." + field;
}

Reader Reader::nested(const std::string& field) const { return Reader(path(field)); }

void Reader::merge(const Reader& other) {
  errors_.insert(errors_.end(), other.errors_.begin(), other.errors_.end());
}

void Reader::finish(const std::string& what) const {
  if (errors_.empty()) return;
  std::string msg = what + ": ";
  for (std::size_t i = 0; i < errors_.size(); ++i) {
    if (i) msg += "; ";
    msg += errors_[i].field + " " + errors_[i].message;
  }
  throw ValidationError(msg, errors_);
}

std::optional<double> Reader::number(const json& obj, const std::string& field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    fail(field, "must be a number");
    return std::nullopt;
  }
  return it->get<double>();
}

std::optional<long long> Reader::integer(const json& obj, const std::string& field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_number_integer()) return it->get<long long>();
  if (it->is_number_float()) {
    const double v = it->get<double>();
    if (std::floor(v) == v && std::abs(v) < 9e15) return static_cast<long long>(v);
  }
  fail(field, "must be an integer");
  return std::nullopt;
}

std::optional<bool> Reader::boolean(const json& obj, const std::string& field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_boolean()) {
    fail(field, "must be true or false");
    return std::nullopt;
  }
  return it->get<bool>();
}

std::optional<std::string> Reader::string(const json& obj, const std::string& field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) {
    fail(field, "must be a string");
    return std::nullopt;
  }
  return it->get<std::string>();
}

std::optional<std::vector<std::string>> Reader::strings(const json& obj, const std::string& field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return std::vector<std::string>{it->get<std::string>()};
  if (!it->is_array() || !std::all_of(it->begin(), it->end(), [](const json& v) { return v.is_string(); })) {
    fail(field, "must be a list of strings");
    return std::nullopt;
  }
  return it->get<std::vector<std::string>>();
}

void Reader::known_fields(const json& obj, std::initializer_list<std::string_view> allowed) {
  if (!obj.is_object()) return;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
      fail(it.key(), "unknown field");
    }
  }
}

namespace {

bool require_object(const json& j, Reader& r, const std::string& what) {
  if (j.is_object()) return true;
  r.fail("", what + " must be a JSON object");
  return false;
}

template <typename T>
void set_int(Reader& r, const json& j, const std::string& field, T& target) {
  if (auto v = r.integer(j, field)) target = static_cast<T>(*v);
}

void set_double(Reader& r, const json& j, const std::string& field, double& target) {
  if (auto v = r.number(j, field)) target = *v;
}

std::optional<Timestamp> read_time(Reader& r, const json& j, const std::string& field) {
  auto s = r.string(j, field);
  if (!s) return std::nullopt;
  auto t = parse_iso8601(*s);
  if (!t) r.fail(field, "must be an ISO-8601 date or timestamp");
  return t;
}

// Moves the ValidationError raised by a library validate() into the reader.
template <typename F>
void absorb(Reader& r, F&& check) {
  try {
    check();
  } catch (const ValidationError& e) {
    if (e.fields().empty()) {
      r.fail("", e.what());
    } else {
      for (const auto& f : e.fields()) r.fail(f.field, f.message);
    }
  }
}

}  // namespace

// --- classifier --------------------------------------------------------------------------

json to_json(const ClassifierSpec& spec) {
  const auto& p = spec.params;
  json j{{"kind", to_string(spec.kind)}, {"seed", spec.seed}};
  switch (spec.kind) {
    case ClassifierKind::zero_r: break;
    case ClassifierKind::naive_bayes_multinomial: j["alpha"] = p.alpha; break;
    case ClassifierKind::knn: j["k"] = p.k; break;
    case ClassifierKind::logistic_regression:
    case ClassifierKind::sgd_text:
      j["l2"] = p.l2;
      j["learning_rate"] = p.learning_rate;
      j["epochs"] = p.epochs;
      j["tolerance"] = p.tolerance;
      break;
    case ClassifierKind::random_forest:
      j["trees"] = p.trees;
      j["max_depth"] = p.max_depth;
      j["features_per_split"] = p.features_per_split;
      j["min_samples_split"] = p.min_samples_split;
      j["bootstrap"] = p.bootstrap;
      j["threads"] = p.threads;
      break;
  }
  return j;
}

ClassifierSpec classifier_from_json(const json& j, Reader& r) {
  ClassifierSpec spec;
  json obj = j;
  if (j.is_string()) obj = json{{"kind", j}};
  if (!require_object(obj, r, "classifier")) return spec;
  r.known_fields(obj, {"kind", "seed", "k", "alpha", "l2", "learning_rate", "epochs", "tolerance",
                       "trees", "max_depth", "features_per_split", "min_samples_split",
                       "bootstrap", "threads"});
  auto kind = r.string(obj, "kind");
  if (!kind) {
    r.fail("kind", "is required");
    return spec;
  }
  if (auto k = parse_classifier_kind(*kind)) {
    spec.kind = *k;
  } else {
    std::string names;
    for (auto c : all_classifier_kinds()) names += (names.empty() ? "" : ", ") + std::string(to_string(c));
    r.fail("kind", "unknown classifier kind '" + *kind + "' (expected one of " + names + ")");
    return spec;
  }
  auto& p = spec.params;
  if (auto v = r.integer(obj, "seed")) spec.seed = static_cast<std::uint64_t>(*v);
  set_int(r, obj, "k", p.k);
  set_double(r, obj, "alpha", p.alpha);
  set_double(r, obj, "l2", p.l2);
  set_double(r, obj, "learning_rate", p.learning_rate);
  set_int(r, obj, "epochs", p.epochs);
  set_double(r, obj, "tolerance", p.tolerance);
  set_int(r, obj, "trees", p.trees);
  set_int(r, obj, "max_depth", p.max_depth);
  set_int(r, obj, "features_per_split", p.features_per_split);
  set_int(r, obj, "min_samples_split", p.min_samples_split);
  if (auto v = r.boolean(obj, "bootstrap")) p.bootstrap = *v;
  set_int(r, obj, "threads", p.threads);
  absorb(r, [&] { spec.validate(); });
  return spec;
}

// --- resample / text / windows ------------------------------------------------------------

json to_json(const ResampleSpec& spec) {
  json j{{"method", to_string(spec.method)}, {"k_neighbors", spec.k_neighbors}, {"seed", spec.seed}};
  if (spec.size_factor) j["size_factor"] = *spec.size_factor;
  return j;
}

ResampleSpec resample_from_json(const json& j, Reader& r) {
  ResampleSpec spec;
  json obj = j;
  if (j.is_string()) obj = json{{"method", j}};
  if (!require_object(obj, r, "resample")) return spec;
  r.known_fields(obj, {"method", "size_factor", "k_neighbors", "seed"});
  if (auto m = r.string(obj, "method")) {
    if (auto method = parse_resample_method(*m)) {
      spec.method = *method;
    } else {
      r.fail("method", "unknown resample method '" + *m + "' (none, undersample, oversample, smote)");
    }
  }
  if (auto v = r.number(obj, "size_factor")) spec.size_factor = *v;
  set_int(r, obj, "k_neighbors", spec.k_neighbors);
  if (auto v = r.integer(obj, "seed")) spec.seed = static_cast<std::uint64_t>(*v);
  absorb(r, [&] { spec.validate(); });
  return spec;
}

json to_json(const WindowConfig& config) {
  auto w = [](Seconds s) { return static_cast<double>(s.count()) / static_cast<double>(weeks(1).count()); };
  return {{"training_weeks", w(config.training_window)},
          {"testing_weeks", w(config.testing_window)},
          {"step_weeks", w(config.effective_step())}};
}

WindowConfig window_from_json(const json& j, Reader& r) {
  WindowConfig c;
  if (!require_object(j, r, "window")) return c;
  r.known_fields(j, {"training_weeks", "testing_weeks", "step_weeks"});
  auto to_seconds = [](double w) { return Seconds{static_cast<long long>(std::llround(w * weeks(1).count()))}; };
  if (auto v = r.number(j, "training_weeks")) c.training_window = to_seconds(*v);
  if (auto v = r.number(j, "testing_weeks")) c.testing_window = to_seconds(*v);
  if (auto v = r.number(j, "step_weeks")) c.step = to_seconds(*v);
  absorb(r, [&] { c.validate(); });
  return c;
}

json to_json(const TextModelOptions& o) {
  return {{"select_features", o.select_features},
          {"ig_threshold", o.ig_threshold},
          {"resample", to_json(o.resample)}};
}

TextModelOptions text_options_from_json(const json& j, Reader& r) {
  TextModelOptions o;
  if (!require_object(j, r, "text options")) return o;
  r.known_fields(j, {"select_features", "ig_threshold", "resample"});
  if (auto v = r.boolean(j, "select_features")) o.select_features = *v;
  set_double(r, j, "ig_threshold", o.ig_threshold);
  if (j.contains("resample")) {
    Reader sub = r.nested("resample");
    o.resample = resample_from_json(j["resample"], sub);
    r.merge(sub);
  }
  return o;
}

// --- savings -------------------------------------------------------------------------------

json to_json(const SavingsParams& p) {
  return {{"issues_per_day", p.issues_per_day},
          {"manual_seconds_per_issue", p.manual_seconds_per_issue},
          {"auto_ms_per_issue", p.auto_ms_per_issue},
          {"accuracy", p.accuracy},
          {"correct_count_rule", p.rule == CorrectCountRule::floor_paper ? "floor_paper" : "exact"},
          {"working_days_per_month", p.working_days_per_month}};
}

SavingsParams savings_from_json(const json& j, Reader& r) {
  SavingsParams p = SavingsParams::paper_rq5();
  if (j.is_string()) {
    if (j.get<std::string>() != "paper-rq5") r.fail("", "unknown savings profile '" + j.get<std::string>() + "'");
    return p;
  }
  if (!require_object(j, r, "savings")) return p;
  r.known_fields(j, {"profile", "issues_per_day", "manual_seconds_per_issue", "auto_ms_per_issue",
                     "accuracy", "correct_count_rule", "working_days_per_month"});
  if (auto prof = r.string(j, "profile"); prof && *prof != "paper-rq5") {
    r.fail("profile", "unknown savings profile '" + *prof + "'");
  }
  set_double(r, j, "issues_per_day", p.issues_per_day);
  set_double(r, j, "manual_seconds_per_issue", p.manual_seconds_per_issue);
  set_double(r, j, "auto_ms_per_issue", p.auto_ms_per_issue);
  set_double(r, j, "accuracy", p.accuracy);
  set_double(r, j, "working_days_per_month", p.working_days_per_month);
  if (auto rule = r.string(j, "correct_count_rule")) {
    if (*rule == "floor_paper") {
      p.rule = CorrectCountRule::floor_paper;
    } else if (*rule == "exact") {
      p.rule = CorrectCountRule::exact;
    } else {
      r.fail("correct_count_rule", "must be floor_paper or exact");
    }
  }
  absorb(r, [&] { p.validate(); });
  return p;
}

json to_json(const SavingsReport& s) {
  return {{"correct_per_day", s.correct_per_day},
          {"wrong_per_day", s.wrong_per_day},
          {"auto_seconds_per_day", s.auto_seconds_per_day},
          {"manual_seconds_per_day", s.manual_seconds_per_day},
          {"reduction_fraction", s.reduction_fraction},
          {"monthly_hours_saved", s.monthly_hours_saved},
          {"reported_reduction_results", kReportedReductionResults},
          {"reported_reduction_lessons", kReportedReductionLessons}};
}

// --- synthetic spec ------------------------------------------------------------------------

SyntheticSpec synthetic_from_json(const json& j, Reader& r) {
  SyntheticSpec spec = SyntheticSpec::reference_defaults();
  if (j.is_string()) {
    if (j.get<std::string>() != "reference") r.fail("", "unknown synthetic preset '" + j.get<std::string>() + "'");
    return spec;
  }
  if (!require_object(j, r, "synthetic spec")) return spec;
  r.known_fields(j, {"base", "counts", "noise_rate", "crosstalk_rate", "start", "end",
                     "core_terms_per_subteam", "noise_vocabulary", "summary_words",
                     "description_words", "seasonality", "core_terms", "noise_terms"});
  if (auto base = r.string(j, "base"); base && *base != "reference") {
    if (*base == "flat") {
      spec.seasonality.clear();
    } else {
      r.fail("base", "must be 'reference' or 'flat'");
    }
  }
  if (j.contains("counts")) {
    const auto& counts = j["counts"];
    if (!counts.is_object()) {
      r.fail("counts", "must map sub-team labels to counts");
    } else {
      spec.subteams.clear();
      for (auto it = counts.begin(); it != counts.end(); ++it) {
        if (!it->is_number_integer() || it->get<long long>() < 0) {
          r.fail("counts." + it.key(), "must be a non-negative integer");
          continue;
        }
        spec.subteams.push_back({it.key(), it->get<std::size_t>(), {}});
      }
    }
  }
  set_double(r, j, "noise_rate", spec.noise_rate);
  set_double(r, j, "crosstalk_rate", spec.crosstalk_rate);
  if (auto t = read_time(r, j, "start")) spec.start = *t;
  if (auto t = read_time(r, j, "end")) spec.end = *t;
  set_int(r, j, "core_terms_per_subteam", spec.core_terms_per_subteam);
  set_int(r, j, "noise_vocabulary", spec.noise_vocabulary);
  auto range = [&](const char* field, std::size_t& lo, std::size_t& hi) {
    if (!j.contains(field)) return;
    const auto& v = j[field];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_unsigned() || !v[1].is_number_unsigned()) {
      r.fail(field, "must be [min, max] with non-negative integers");
      return;
    }
    lo = v[0].get<std::size_t>();
    hi = v[1].get<std::size_t>();
  };
  range("summary_words", spec.summary_words_min, spec.summary_words_max);
  range("description_words", spec.description_words_min, spec.description_words_max);
  if (j.contains("seasonality")) {
    const auto& s = j["seasonality"];
    if (!s.is_object()) {
      r.fail("seasonality", "must map team labels to 52 weekly weights");
    } else {
      spec.seasonality.clear();
      for (auto it = s.begin(); it != s.end(); ++it) {
        try {
          spec.seasonality[it.key()] = it->get<std::vector<double>>();
        } catch (const json::exception&) {
          r.fail("seasonality." + it.key(), "must be a list of numbers");
        }
      }
    }
  }
  if (j.contains("core_terms")) {
    const auto& ct = j["core_terms"];
    for (auto it = ct.begin(); ct.is_object() && it != ct.end(); ++it) {
      auto prof = std::find_if(spec.subteams.begin(), spec.subteams.end(),
                               [&](const SubteamProfile& p) { return p.label == it.key(); });
      if (prof == spec.subteams.end() || !it->is_array()) {
        r.fail("core_terms." + it.key(), "must name a listed sub-team and give a list of words");
        continue;
      }
      prof->core_terms = it->get<std::vector<std::string>>();
    }
  }
  if (auto nt = r.strings(j, "noise_terms")) spec.noise_terms = *nt;
  if (r.ok()) absorb(r, [&] { spec.validate(); });
  return spec;
}

// --- datasets ------------------------------------------------------------------------------

DatasetSource dataset_from_json(const json& j, Reader& r) {
  DatasetSource d;
  if (j.is_string() && j.get<std::string>() == "synthetic") return d;
  if (!require_object(j, r, "dataset")) return d;
  r.known_fields(j, {"synthetic", "seed", "csv", "path"});
  const int sources = static_cast<int>(j.contains("synthetic")) + static_cast<int>(j.contains("csv")) +
                      static_cast<int>(j.contains("path"));
  if (sources > 1) r.fail("", "give exactly one of synthetic, csv, path");
  if (j.contains("csv")) {
    d.kind = DatasetSource::Kind::csv_text;
    if (auto s = r.string(j, "csv")) d.text = *s;
  } else if (j.contains("path")) {
    d.kind = DatasetSource::Kind::csv_file;
    if (auto s = r.string(j, "path")) d.text = *s;
  } else {
    d.kind = DatasetSource::Kind::synthetic;
    if (j.contains("synthetic")) {
      Reader sub = r.nested("synthetic");
      d.synthetic = synthetic_from_json(j["synthetic"], sub);
      r.merge(sub);
    }
  }
  if (auto v = r.integer(j, "seed")) d.seed = static_cast<std::uint64_t>(*v);
  return d;
}

json to_json(const DatasetSource& d) {
  switch (d.kind) {
    case DatasetSource::Kind::synthetic:
      return {{"synthetic", {{"noise_rate", d.synthetic.noise_rate},
                             {"crosstalk_rate", d.synthetic.crosstalk_rate},
                             {"issues", d.synthetic.total()}}},
              {"seed", d.seed}};
    case DatasetSource::Kind::csv_text: return {{"csv", std::to_string(d.text.size()) + " bytes"}};
    case DatasetSource::Kind::csv_file: return {{"path", d.text}};
  }
  return nullptr;
}

IngestResult load_dataset(const DatasetSource& d) {
  switch (d.kind) {
    case DatasetSource::Kind::synthetic: {
      IssueCorpus corpus = generate_synthetic(d.synthetic, d.seed);
      IngestResult out;
      out.report.rows_read = corpus.size();
      out.report.retained = corpus.size();
      out.corpus = std::move(corpus);
      return out;
    }
    case DatasetSource::Kind::csv_text: return ingest_csv(d.text);
    case DatasetSource::Kind::csv_file: {
      std::ifstream in(d.text, std::ios::binary);
      if (!in) throw ValidationError("cannot read dataset file '" + d.text + "'");
      std::ostringstream buf;
      buf << in.rdbuf();
      return ingest_csv(buf.str());
    }
  }
  throw ValidationError("unknown dataset kind");
}

json to_json(const IngestReport& report) {
  json errors = json::array();
  for (const auto& e : report.errors) errors.push_back({{"line", e.line}, {"key", e.key}, {"message", e.message}});
  return {{"rows_read", report.rows_read},
          {"retained", report.retained},
          {"removed_open", report.removed_open},
          {"removed_duplicate", report.removed_duplicate},
          {"removed_unassigned", report.removed_unassigned},
          {"removed_unlabeled", report.removed_unlabeled},
          {"errors", std::move(errors)}};
}

// --- results -------------------------------------------------------------------------------

json to_json(const ConfusionMatrix& cm) {
  json rows = json::array();
  for (std::size_t t = 0; t < cm.size(); ++t) {
    json row = json::array();
    for (std::size_t p = 0; p < cm.size(); ++p) row.push_back(cm.at(t, p));
    rows.push_back(std::move(row));
  }
  return {{"labels", cm.label_set()}, {"counts", std::move(rows)}};
}

ConfusionMatrix confusion_from_json(const json& j) {
  ConfusionMatrix cm(j.at("labels").get<std::vector<std::string>>());
  const auto& rows = j.at("counts");
  if (rows.size() != cm.size()) throw ValidationError("confusion matrix: row count mismatch");
  for (std::size_t t = 0; t < cm.size(); ++t) {
    if (rows[t].size() != cm.size()) throw ValidationError("confusion matrix: column count mismatch");
    for (std::size_t p = 0; p < cm.size(); ++p) {
      const auto n = rows[t][p].get<std::size_t>();
      if (n) cm.add(t, p, n);
    }
  }
  return cm;
}

namespace {

json class_to_json(const ClassMetrics& c) {
  return {{"label", c.label},
          {"precision", c.precision},
          {"recall", c.recall},
          {"f_measure", c.f_measure},
          {"support", c.support}};
}

ClassMetrics class_from_json(const json& j) {
  return {j.at("label").get<std::string>(), j.at("precision").get<double>(),
          j.at("recall").get<double>(), j.at("f_measure").get<double>(),
          j.at("support").get<std::size_t>()};
}

}  // namespace

json to_json(const EvaluationReport& report) {
  json runs = json::array();
  for (const auto& r : report.runs) {
    runs.push_back({{"repeat", r.repeat},
                    {"fold", r.fold},
                    {"accuracy", r.accuracy},
                    {"weighted_f", r.weighted_f},
                    {"train_size", r.train_size},
                    {"test_size", r.test_size}});
  }
  json per_class = json::array();
  for (const auto& c : report.per_class) per_class.push_back(class_to_json(c));
  return {{"classifier", report.classifier},
          {"resample", report.resample},
          {"fingerprint", report.fingerprint},
          {"folds", report.folds},
          {"repeats", report.repeats},
          {"mean_accuracy", report.mean_accuracy},
          {"std_accuracy", report.std_accuracy},
          {"mean_weighted_f", report.mean_weighted_f},
          {"std_weighted_f", report.std_weighted_f},
          {"macro_f", report.macro_f},
          {"per_class", std::move(per_class)},
          {"confusion", to_json(report.confusion)},
          {"runs", std::move(runs)}};
}

EvaluationReport report_from_json(const json& j) {
  try {
    EvaluationReport r;
    r.classifier = j.at("classifier").get<std::string>();
    r.resample = j.at("resample").get<std::string>();
    r.fingerprint = j.at("fingerprint").get<std::string>();
    r.folds = j.at("folds").get<int>();
    r.repeats = j.at("repeats").get<int>();
    r.mean_accuracy = j.at("mean_accuracy").get<double>();
    r.std_accuracy = j.at("std_accuracy").get<double>();
    r.mean_weighted_f = j.at("mean_weighted_f").get<double>();
    r.std_weighted_f = j.at("std_weighted_f").get<double>();
    r.macro_f = j.at("macro_f").get<double>();
    for (const auto& c : j.at("per_class")) r.per_class.push_back(class_from_json(c));
    r.confusion = confusion_from_json(j.at("confusion"));
    for (const auto& run : j.at("runs")) {
      r.runs.push_back({run.at("repeat").get<int>(), run.at("fold").get<int>(),
                        run.at("accuracy").get<double>(), run.at("weighted_f").get<double>(),
                        run.at("train_size").get<std::size_t>(), run.at("test_size").get<std::size_t>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed evaluation report: ") + e.what());
  }
}

json to_json(const SlidingWindowReport& report) {
  json windows = json::array();
  for (const auto& w : report.windows) {
    json jw{{"train_begin", format_iso8601(w.window.train_begin)},
            {"train_end", format_iso8601(w.window.train_end)},
            {"test_begin", format_iso8601(w.window.test_begin)},
            {"test_end", format_iso8601(w.window.test_end)},
            {"evaluated", w.evaluated},
            {"train_size", w.train_size},
            {"test_size", w.test_size}};
    if (w.evaluated) {
      jw["accuracy"] = w.accuracy;
      jw["weighted_f"] = w.weighted_f;
    } else {
      jw["skip_reason"] = w.skip_reason;
    }
    windows.push_back(std::move(jw));
  }
  return {{"config", to_json(report.config)},
          {"windows_planned", report.windows.size()},
          {"windows_evaluated", report.evaluated},
          {"mean_accuracy", report.mean_accuracy},
          {"std_accuracy", report.std_accuracy},
          {"mean_weighted_f", report.mean_weighted_f},
          {"std_weighted_f", report.std_weighted_f},
          {"windows", std::move(windows)}};
}

json to_json(const AssignmentResult& r) {
  return {{"issue_key", r.issue_key},
          {"team", r.team},
          {"subteam", r.subteam},
          {"team_confidence", r.team_confidence},
          {"subteam_confidence", r.subteam_confidence},
          {"model_ids", r.model_ids},
          {"latency_ms", r.latency_ms},
          {"low_evidence", r.low_evidence}};
}

json to_json(const TTestResult& t) {
  json j{{"p", t.p}, {"significant", t.significant}, {"infinite", t.infinite}};
  // JSON has no infinity.
  j["t"] = std::isfinite(t.t) ? json(t.t) : json(t.t > 0 ? "inf" : "-inf");
  return j;
}

}  // namespace triage::schema
