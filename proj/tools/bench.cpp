// SPDX-License-Identifier: Apache-2.0
// bench run --config <file> --out <dir> [--seed N] [--table csv|txt]
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "triage/csv.hpp"
#include "triage/error.hpp"
#include "triage/evaluate.hpp"
#include "triage/service/schema.hpp"

namespace fs = std::filesystem;
using namespace triage;
using nlohmann::json;

namespace {

struct ResampleGrid {
  std::vector<ResampleSpec> methods;
  std::vector<ClassifierSpec> classifiers;  // empty: best of the main grid per experiment
};

struct WindowGrid {
  std::vector<WindowConfig> configs;
  std::vector<Experiment> experiments;
  std::optional<ClassifierSpec> classifier;  // unset: best of the main grid per experiment
};

struct BenchConfig {
  schema::DatasetSource dataset;
  std::vector<Experiment> experiments;
  std::vector<ClassifierSpec> classifiers;
  CrossValidationOptions cv;
  std::optional<ResampleGrid> resample;
  std::optional<WindowGrid> windows;
  SavingsParams savings = SavingsParams::paper_rq5();
  double holdout = 0.1;  // chronological tail used to measure the trained pipelines
};

std::vector<Experiment> read_experiments(const json& j, schema::Reader& r, const std::string& field) {
  std::vector<Experiment> out;
  auto names = r.strings(j, field);
  if (!names) return out;
  for (const auto& n : *names) {
    if (auto e = parse_experiment(n)) out.push_back(*e);
    else r.fail(field, "unknown experiment '" + n + "' (E1, E2, E3, E4)");
  }
  return out;
}

std::vector<ClassifierSpec> read_classifiers(const json& j, schema::Reader& r, const std::string& field) {
  std::vector<ClassifierSpec> out;
  if (!j.contains(field)) return out;
  const json& arr = j[field];
  if (!arr.is_array() || arr.empty()) {
    r.fail(field, "must be a non-empty array");
    return out;
  }
  for (std::size_t i = 0; i < arr.size(); ++i) {
    schema::Reader sub = r.nested(field + "[" + std::to_string(i) + "]");
    out.push_back(schema::classifier_from_json(arr[i], sub));
    r.merge(sub);
  }
  return out;
}

BenchConfig parse_config(const json& j) {
  schema::Reader r;
  BenchConfig c;
  if (!j.is_object()) {
    r.fail("", "config must be a JSON object");
    r.finish("invalid bench config");
  }
  r.known_fields(j, {"dataset", "experiments", "classifiers", "cv", "text", "resample", "windows",
                     "savings", "holdout"});
  if (j.contains("dataset")) {
    schema::Reader sub = r.nested("dataset");
    c.dataset = schema::dataset_from_json(j["dataset"], sub);
    r.merge(sub);
  }
  c.experiments = read_experiments(j, r, "experiments");
  if (!j.contains("experiments")) c.experiments = {Experiment::E1, Experiment::E2, Experiment::E3, Experiment::E4};
  c.classifiers = read_classifiers(j, r, "classifiers");
  if (!j.contains("classifiers")) r.fail("classifiers", "required");

  if (j.contains("cv")) {
    schema::Reader sub = r.nested("cv");
    const json& cv = j["cv"];
    if (!cv.is_object()) {
      sub.fail("", "must be an object");
    } else {
      sub.known_fields(cv, {"folds", "repeats", "seed", "threads"});
      if (auto v = sub.integer(cv, "folds")) c.cv.folds = static_cast<int>(*v);
      if (auto v = sub.integer(cv, "repeats")) c.cv.repeats = static_cast<int>(*v);
      if (auto v = sub.integer(cv, "seed")) c.cv.seed = static_cast<std::uint64_t>(*v);
      if (auto v = sub.integer(cv, "threads")) c.cv.threads = static_cast<int>(*v);
      if (c.cv.folds < 2) sub.fail("folds", "must be at least 2");
      if (c.cv.repeats < 1) sub.fail("repeats", "must be at least 1");
    }
    r.merge(sub);
  }
  if (j.contains("text")) {
    schema::Reader sub = r.nested("text");
    c.cv.text = schema::text_options_from_json(j["text"], sub);
    r.merge(sub);
  }
  if (j.contains("resample")) {
    schema::Reader sub = r.nested("resample");
    const json& rs = j["resample"];
    ResampleGrid grid;
    if (!rs.is_object()) {
      sub.fail("", "must be an object");
    } else {
      sub.known_fields(rs, {"methods", "classifiers"});
      if (rs.contains("methods") && rs["methods"].is_array()) {
        for (std::size_t i = 0; i < rs["methods"].size(); ++i) {
          schema::Reader m = sub.nested("methods[" + std::to_string(i) + "]");
          grid.methods.push_back(schema::resample_from_json(rs["methods"][i], m));
          sub.merge(m);
        }
      } else {
        sub.fail("methods", "must be an array");
      }
      grid.classifiers = read_classifiers(rs, sub, "classifiers");
    }
    r.merge(sub);
    c.resample = std::move(grid);
  }
  if (j.contains("windows")) {
    schema::Reader sub = r.nested("windows");
    const json& ws = j["windows"];
    WindowGrid grid;
    if (!ws.is_object()) {
      sub.fail("", "must be an object");
    } else {
      sub.known_fields(ws, {"configs", "experiments", "classifier"});
      if (ws.contains("configs") && ws["configs"].is_array()) {
        for (std::size_t i = 0; i < ws["configs"].size(); ++i) {
          schema::Reader w = sub.nested("configs[" + std::to_string(i) + "]");
          grid.configs.push_back(schema::window_from_json(ws["configs"][i], w));
          sub.merge(w);
        }
      } else {
        sub.fail("configs", "must be an array");
      }
      grid.experiments = read_experiments(ws, sub, "experiments");
      if (!ws.contains("experiments")) grid.experiments = c.experiments;
      if (ws.contains("classifier")) {
        schema::Reader cl = sub.nested("classifier");
        grid.classifier = schema::classifier_from_json(ws["classifier"], cl);
        sub.merge(cl);
      }
    }
    r.merge(sub);
    c.windows = std::move(grid);
  }
  if (j.contains("savings")) {
    schema::Reader sub = r.nested("savings");
    c.savings = schema::savings_from_json(j["savings"], sub);
    r.merge(sub);
  }
  if (auto v = r.number(j, "holdout")) {
    if (*v < 0.0 || *v >= 1.0) r.fail("holdout", "must be in [0, 1)");
    c.holdout = *v;
  }
  r.finish("invalid bench config");
  return c;
}

// --- rendering -------------------------------------------------------------------------------

struct TextTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> notes;

  std::string csv() const {
    std::string out = csv::format_row(header) + "\n";
    for (const auto& r : rows) out += csv::format_row(r) + "\n";
    return out;
  }

  std::string txt() const {
    std::vector<std::size_t> width(header.size(), 0);
    auto grow = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < r.size() && i < width.size(); ++i) width[i] = std::max(width[i], r[i].size());
    };
    grow(header);
    for (const auto& r : rows) grow(r);
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& r) {
      for (std::size_t i = 0; i < width.size(); ++i) {
        const std::string cell = i < r.size() ? r[i] : "";
        out << (i ? "  " : "") << cell << std::string(width[i] - cell.size(), ' ');
      }
      out << '\n';
    };
    line(header);
    std::vector<std::string> rule;
    for (auto w : width) rule.push_back(std::string(w, '-'));
    line(rule);
    for (const auto& r : rows) line(r);
    for (const auto& n : notes) out << n << '\n';
    return out.str();
  }
};

std::string pct(double mean, double sd) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f(%.2f)", 100.0 * mean, 100.0 * sd);
  return buf;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + p.string() + "'");
  out << text;
}

// --- the run ---------------------------------------------------------------------------------

struct Cell {
  std::optional<EvaluationReport> report;
  std::string error;
};

class Bench {
 public:
  Bench(BenchConfig config, fs::path out, bool csv) : c_(std::move(config)), out_(std::move(out)), csv_(csv) {}

  int run() {
    fs::create_directories(out_);
    const auto t0 = std::chrono::steady_clock::now();
    load();
    cv_results();
    if (c_.resample) resampling();
    if (c_.windows) sliding_windows();
    chained();
    savings();
    report_["elapsed_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report_["failures"] = failures_;
    write_file(out_ / "report.json", report_.dump(2) + "\n");
    std::cout << "wrote " << (out_ / "report.json").string() << '\n';
    if (!failures_.empty()) {
      std::cerr << failures_.size() << " run(s) failed\n";
      return 1;
    }
    return 0;
  }

 private:
  void note_failure(const std::string& where, const std::string& what) {
    failures_.push_back({{"where", where}, {"error", what}});
    std::cerr << "FAILED " << where << ": " << what << '\n';
  }

  void emit(const std::string& name, const TextTable& t) {
    const std::string text = csv_ ? t.csv() : t.txt();
    write_file(out_ / (name + (csv_ ? ".csv" : ".txt")), text);
    std::cout << "== " << name << " ==\n" << t.txt() << '\n';
  }

  void load() {
    IngestResult ingested = schema::load_dataset(c_.dataset);
    corpus_ = std::move(ingested.corpus);
    if (corpus_.empty()) throw ValidationError("dataset has no usable issues");
    for (const auto& issue : corpus_.issues()) docs_.push_back(preprocess(issue, StopwordList::rainbow()));
    json counts = json::object();
    for (const auto& [k, v] : corpus_.subteam_counts()) counts[k] = v;
    const auto [b, e] = corpus_.span();
    report_["dataset"] = {{"source", schema::to_json(c_.dataset)},
                          {"ingest", schema::to_json(ingested.report)},
                          {"issues", corpus_.size()},
                          {"subteam_counts", counts},
                          {"span", {{"begin", format_iso8601(b)}, {"end", format_iso8601(e)}}}};
    report_["cv"] = {{"folds", c_.cv.folds}, {"repeats", c_.cv.repeats}, {"seed", c_.cv.seed},
                     {"text", schema::to_json(c_.cv.text)}};
  }

  Cell evaluate(const ClassifierSpec& spec, Experiment e, const TextModelOptions& text) {
    Cell cell;
    if (spec.kind == ClassifierKind::sgd_text && experiment_labels(e).size() != 2) {
      cell.error = "binary-only classifier";
      return cell;
    }
    try {
      auto cv = c_.cv;
      cv.text = text;
      cell.report = cross_validate(spec, experiment_documents(docs_, e), experiment_labels(e), cv);
      std::cerr << to_string(e) << ' ' << spec.describe() << ' ' << cell.report->mean_accuracy << '\n';
    } catch (const std::exception& ex) {
      cell.error = ex.what();
      note_failure(std::string(to_string(e)) + " " + spec.describe(), ex.what());
    }
    return cell;
  }

  void cv_results() {
    const double ratio = 1.0 / static_cast<double>(c_.cv.folds - 1);
    std::vector<std::vector<Cell>> grid(c_.classifiers.size());
    for (std::size_t i = 0; i < c_.classifiers.size(); ++i) {
      for (auto e : c_.experiments) grid[i].push_back(evaluate(c_.classifiers[i], e, c_.cv.text));
    }

    TextTable t;
    t.header = {"classifier"};
    for (auto e : c_.experiments) t.header.emplace_back(to_string(e));
    for (const auto& s : c_.classifiers) t.rows.push_back({s.describe()});
    json cells = json::array();
    for (std::size_t col = 0; col < c_.experiments.size(); ++col) {
      std::optional<std::size_t> best;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& r = grid[i][col].report;
        if (r && (!best || r->mean_accuracy > grid[*best][col].report->mean_accuracy)) best = i;
      }
      if (best) best_[c_.experiments[col]] = {c_.classifiers[*best], *grid[*best][col].report};
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const Cell& cell = grid[i][col];
        json jc{{"experiment", to_string(c_.experiments[col])}, {"classifier", c_.classifiers[i].describe()}};
        if (!cell.report) {
          t.rows[i].push_back(cell.error == "binary-only classifier" ? "n/a" : "failed");
          jc["error"] = cell.error;
          cells.push_back(std::move(jc));
          continue;
        }
        std::string text = pct(cell.report->mean_accuracy, cell.report->std_accuracy);
        jc["report"] = schema::to_json(*cell.report);
        if (best && i == *best) {
          text += "+";
          jc["best"] = true;
        } else if (best) {
          const auto a = grid[*best][col].report->accuracies();
          const auto b = cell.report->accuracies();
          if (a.size() == b.size() && a.size() >= 2) {
            std::vector<double> diffs(a.size());
            for (std::size_t k = 0; k < a.size(); ++k) diffs[k] = a[k] - b[k];
            const auto tt = corrected_t_test(diffs, ratio);
            jc["t_test_vs_best"] = schema::to_json(tt);
            if (!tt.significant) text += "*";
          }
        }
        t.rows[i].push_back(text);
        cells.push_back(std::move(jc));
      }
    }
    t.notes = {"accuracy % mean(std) over folds x repeats; + best in column;",
               "* no significant difference from the best (corrected paired t-test, alpha 0.05)"};
    emit("cv_results", t);
    report_["cv_results"] = std::move(cells);
  }

  std::vector<ClassifierSpec> resample_classifiers(Experiment e) const {
    if (!c_.resample->classifiers.empty()) return c_.resample->classifiers;
    if (auto it = best_.find(e); it != best_.end()) return {it->second.first};
    return {};
  }

  void resampling() {
    TextTable t;
    t.header = {"classifier", "resample"};
    for (auto e : c_.experiments) t.header.emplace_back(to_string(e));
    json cells = json::array();
    std::map<std::pair<std::string, std::string>, std::size_t> row_of;
    for (std::size_t col = 0; col < c_.experiments.size(); ++col) {
      const Experiment e = c_.experiments[col];
      for (const auto& spec : resample_classifiers(e)) {
        for (const auto& rs : c_.resample->methods) {
          const auto key = std::pair{spec.describe(), std::string(to_string(rs.method))};
          auto [it, inserted] = row_of.emplace(key, t.rows.size());
          if (inserted) {
            t.rows.push_back({key.first, key.second});
            t.rows.back().resize(2 + c_.experiments.size());
          }
          auto text = c_.cv.text;
          text.resample = rs;
          const Cell cell = evaluate(spec, e, text);
          json jc{{"experiment", to_string(e)}, {"classifier", key.first}, {"resample", schema::to_json(rs)}};
          if (cell.report) {
            t.rows[it->second][2 + col] = pct(cell.report->mean_accuracy, cell.report->std_accuracy);
            jc["mean_accuracy"] = cell.report->mean_accuracy;
            jc["std_accuracy"] = cell.report->std_accuracy;
            jc["mean_weighted_f"] = cell.report->mean_weighted_f;
          } else {
            t.rows[it->second][2 + col] = "failed";
            jc["error"] = cell.error;
          }
          cells.push_back(std::move(jc));
        }
      }
    }
    t.notes = {"accuracy % mean(std); resampling fit on training folds only"};
    emit("resampling", t);
    report_["resampling"] = std::move(cells);
  }

  void sliding_windows() {
    const auto& g = *c_.windows;
    TextTable t;
    t.header = {"training", "testing"};
    for (auto e : g.experiments) t.header.emplace_back(to_string(e));
    json cells = json::array();
    auto weeks_of = [](Seconds s) { return fixed(static_cast<double>(s.count()) / weeks(1).count(), 0) + "w"; };
    for (const auto& wc : g.configs) {
      std::vector<std::string> row{weeks_of(wc.training_window), weeks_of(wc.testing_window)};
      for (auto e : g.experiments) {
        WindowTask task;
        task.experiment = e;
        task.text = c_.cv.text;
        if (g.classifier) task.classifier = *g.classifier;
        else if (auto it = best_.find(e); it != best_.end()) task.classifier = it->second.first;
        else task.classifier = ClassifierSpec{ClassifierKind::naive_bayes_multinomial, {}, 1};
        json jc{{"experiment", to_string(e)}, {"classifier", task.classifier.describe()}, {"window", schema::to_json(wc)}};
        try {
          const auto rep = sliding_window_eval(task, corpus_, wc);
          const auto [b, en] = corpus_.span();
          const auto expected = window_count(en - b, wc.training_window, wc.testing_window, wc.effective_step());
          row.push_back(pct(rep.mean_accuracy, rep.std_accuracy) + " (" + std::to_string(rep.evaluated) + ")");
          jc["report"] = schema::to_json(rep);
          jc["planned_windows"] = expected;
          std::cerr << to_string(e) << " window " << weeks_of(wc.training_window) << "/"
                    << weeks_of(wc.testing_window) << ' ' << rep.mean_accuracy << '\n';
        } catch (const std::exception& ex) {
          row.push_back("failed");
          jc["error"] = ex.what();
          note_failure(std::string(to_string(e)) + " window", ex.what());
        }
        cells.push_back(std::move(jc));
      }
      t.rows.push_back(std::move(row));
    }
    t.notes = {"accuracy % mean(std) over windows; evaluated window count in parentheses"};
    emit("windows", t);
    report_["windows"] = std::move(cells);
  }

  void chained() {
    json out = json::object();
    TextTable t;
    t.header = {"quantity", "value"};
    const auto teams = corpus_.team_counts();
    const auto& tax = Taxonomy::standard();
    const double n_a = teams.count(tax.teams()[0]) ? static_cast<double>(teams.at(tax.teams()[0])) : 0.0;
    const double prior_a = corpus_.empty() ? 0.5 : n_a / static_cast<double>(corpus_.size());
    if (best_.count(Experiment::E2) && best_.count(Experiment::E3) && best_.count(Experiment::E4)) {
      const double a2 = best_.at(Experiment::E2).second.mean_accuracy;
      const double a3 = best_.at(Experiment::E3).second.mean_accuracy;
      const double a4 = best_.at(Experiment::E4).second.mean_accuracy;
      const double eq = chained_accuracy(a2, a3, a4);
      const double weighted = chained_accuracy_weighted(a2, a3, a4, prior_a);
      out["from_cv"] = {{"team", a2}, {"T_A", a3}, {"T_B", a4}, {"balanced", eq}, {"weighted", weighted},
                        {"prior_T_A", prior_a}};
      t.rows.push_back({"S2 chained (balanced 0.5 weighting)", fixed(100 * eq, 2)});
      t.rows.push_back({"S2 chained (team-prior weighting)", fixed(100 * weighted, 2)});
    }
    if (best_.count(Experiment::E1)) {
      out["s1_from_cv"] = best_.at(Experiment::E1).second.mean_accuracy;
      t.rows.push_back({"S1 flat (cross-validated)", fixed(100 * best_.at(Experiment::E1).second.mean_accuracy, 2)});
    }
    if (c_.holdout > 0.0) measure(out, t);
    t.notes = {"accuracy %"};
    emit("chained", t);
    report_["chained"] = std::move(out);
  }

  // Trains S1 and S2 on the chronological head and measures both on the tail.
  void measure(json& out, TextTable& t) {
    const std::size_t n_test = static_cast<std::size_t>(std::floor(c_.holdout * static_cast<double>(corpus_.size())));
    if (n_test == 0 || n_test >= corpus_.size()) return;
    const std::size_t n_train = corpus_.size() - n_test;
    const std::vector<TokenizedDocument> head(docs_.begin(), docs_.begin() + static_cast<std::ptrdiff_t>(n_train));
    const std::span<const IssueRecord> tail(corpus_.issues().data() + n_train, n_test);
    auto spec_for = [&](Experiment e) {
      if (auto it = best_.find(e); it != best_.end()) return it->second.first;
      return ClassifierSpec{ClassifierKind::naive_bayes_multinomial, {}, 1};
    };
    auto fit = [&](Experiment e) {
      return std::make_shared<const TrainedModel>(fit_text_model(spec_for(e), experiment_documents(head, e),
                                                                 experiment_labels(e), c_.cv.text,
                                                                 StopwordList::rainbow().fingerprint()));
    };
    auto stop = std::make_shared<const StopwordList>(StopwordList::rainbow());
    try {
      const auto flat = AssignmentPipeline::flat(fit(Experiment::E1), stop);
      const auto chain = AssignmentPipeline::chained(fit(Experiment::E2), fit(Experiment::E3), fit(Experiment::E4), stop);
      const auto m1 = measure_chain(flat, tail);
      const auto m2 = measure_chain(chain, tail);
      double latency = 0.0;
      for (const auto& issue : tail) latency += assign(chain, issue).latency_ms;
      latency /= static_cast<double>(tail.size());
      out["holdout"] = {{"train", n_train}, {"test", n_test}, {"s1_accuracy", m1.accuracy},
                        {"s2_accuracy", m2.accuracy}, {"s2_team_accuracy", m2.team_accuracy},
                        {"s2_mean_latency_ms", latency}};
      t.rows.push_back({"S1 flat (chronological holdout)", fixed(100 * m1.accuracy, 2)});
      t.rows.push_back({"S2 chained (chronological holdout)", fixed(100 * m2.accuracy, 2)});
      t.rows.push_back({"S2 mean latency ms", fixed(latency, 3)});
    } catch (const std::exception& ex) {
      note_failure("holdout measurement", ex.what());
    }
  }

  void savings() {
    const SavingsReport s = effort_savings(c_.savings);
    auto exact = c_.savings;
    exact.rule = CorrectCountRule::exact;
    const SavingsReport se = effort_savings(exact);
    TextTable t;
    t.header = {"quantity", "value"};
    t.rows = {{"automatic s/day", fixed(s.auto_seconds_per_day, 2)},
              {"manual s/day", fixed(s.manual_seconds_per_day, 2)},
              {"reduction % (computed)", fixed(100 * s.reduction_fraction, 2)},
              {"reduction % (exact split)", fixed(100 * se.reduction_fraction, 2)},
              {"hours saved per month", fixed(s.monthly_hours_saved, 2)},
              {"reduction % (reference, results)", fixed(100 * kReportedReductionResults, 2)},
              {"reduction % (reference, lessons)", fixed(100 * kReportedReductionLessons, 2)}};
    t.notes = {"reference reductions are listed for comparison; they do not follow from the inputs"};
    emit("savings", t);
    report_["savings"] = {{"params", schema::to_json(c_.savings)},
                          {"floor", schema::to_json(s)},
                          {"exact", schema::to_json(se)}};
  }

  BenchConfig c_;
  fs::path out_;
  bool csv_;
  IssueCorpus corpus_;
  std::vector<TokenizedDocument> docs_;
  std::map<Experiment, std::pair<ClassifierSpec, EvaluationReport>> best_;
  json report_ = json::object();
  json failures_ = json::array();
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Issue assignment experiment runner"};
  app.require_subcommand(1);
  auto* run = app.add_subcommand("run", "Run the experiments in a config file");
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string table = "txt";
  std::optional<int> threads;
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", seed, "Override the dataset and cross-validation seeds");
  run->add_option("--table", table, "Table format")->check(CLI::IsMember({"csv", "txt"}));
  run->add_option("--threads", threads, "Cross-validation threads (0 = all cores)");
  CLI11_PARSE(app, argc, argv);

  try {
    std::ifstream in(config_path);
    BenchConfig config = parse_config(json::parse(in));
    if (seed) {
      config.dataset.seed = *seed;
      config.cv.seed = *seed;
    }
    if (threads) config.cv.threads = *threads;
    return Bench(std::move(config), out_dir, table == "csv").run();
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    for (const auto& f : e.fields()) std::cerr << "  " << f.field << ": " << f.message << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
