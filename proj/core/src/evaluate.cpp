// SPDX-License-Identifier: Apache-2.0
#include "triage/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "triage/error.hpp"
#include "triage/random.hpp"

namespace triage {

// --- confusion matrix and metrics -----------------------------------------------------

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> label_set)
    : labels_(std::move(label_set)), counts_(labels_.size() * labels_.size(), 0) {}

void ConfusionMatrix::add(std::size_t truth, std::size_t predicted, std::size_t count) {
  if (truth >= labels_.size() || predicted >= labels_.size()) {
    throw ValidationError("confusion matrix: label index out of range");
  }
  counts_[truth * labels_.size() + predicted] += count;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.labels_ != labels_) throw ValidationError("confusion matrix: label sets differ");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

std::size_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0});
}

std::size_t ConfusionMatrix::trace() const {
  std::size_t t = 0;
  for (std::size_t i = 0; i < labels_.size(); ++i) t += at(i, i);
  return t;
}

Metrics metrics(const ConfusionMatrix& cm) {
  const std::size_t total = cm.total();
  if (total == 0) throw ValidationError("metrics: confusion matrix is empty");
  const std::size_t k = cm.size();
  Metrics m;
  m.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t row = 0, col = 0;
    for (std::size_t j = 0; j < k; ++j) {
      row += cm.at(c, j);
      col += cm.at(j, c);
    }
    ClassMetrics cls;
    cls.label = cm.label_set()[c];
    cls.support = row;
    const double tp = static_cast<double>(cm.at(c, c));
    cls.precision = col ? tp / static_cast<double>(col) : 0.0;
    cls.recall = row ? tp / static_cast<double>(row) : 0.0;
    const double pr = cls.precision + cls.recall;
    cls.f_measure = pr > 0.0 ? 2.0 * cls.precision * cls.recall / pr : 0.0;
    m.weighted_f += cls.f_measure * static_cast<double>(row);
    m.macro_f += cls.f_measure;
    m.per_class.push_back(std::move(cls));
  }
  m.weighted_f /= static_cast<double>(total);
  m.macro_f /= static_cast<double>(k);
  return m;
}

namespace {

std::pair<double, double> mean_std(std::span<const double> xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Fnv {
  std::uint64_t h = 1469598103934665603ULL;
  void add(std::string_view s) {
    for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
    h = (h ^ 0xFF) * 1099511628211ULL;
  }
};

}  // namespace

std::vector<double> EvaluationReport::accuracies() const {
  std::vector<double> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(r.accuracy);
  return out;
}

void summarize(EvaluationReport& report) {
  std::vector<double> acc, wf;
  for (const auto& r : report.runs) {
    acc.push_back(r.accuracy);
    wf.push_back(r.weighted_f);
  }
  std::tie(report.mean_accuracy, report.std_accuracy) = mean_std(acc);
  std::tie(report.mean_weighted_f, report.std_weighted_f) = mean_std(wf);
  if (report.confusion.total() > 0) {
    const Metrics pooled = metrics(report.confusion);
    report.macro_f = pooled.macro_f;
    report.per_class = pooled.per_class;
  }
}

// --- cross-validation ----------------------------------------------------------------

std::vector<int> stratified_folds(std::span<const int> labels, std::size_t n_classes, int folds,
                                  std::uint64_t seed) {
  if (folds < 2) throw ValidationError("folds must be >= 2");
  std::vector<std::vector<std::size_t>> members(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    members[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  Rng rng(seed);
  std::vector<int> fold(labels.size(), 0);
  // Dealing continues across classes so fold sizes differ by at most one.
  std::size_t next = 0;
  for (auto& m : members) {
    rng.shuffle(std::span<std::size_t>(m));
    for (auto i : m) {
      fold[i] = static_cast<int>(next);
      next = (next + 1) % static_cast<std::size_t>(folds);
    }
  }
  return fold;
}

namespace {

std::vector<int> label_indices(std::span<const TokenizedDocument> docs,
                               const std::vector<std::string>& label_set) {
  std::vector<int> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    if (!d.label) throw ValidationError("document '" + d.issue_key + "' has no label");
    auto it = std::find(label_set.begin(), label_set.end(), *d.label);
    if (it == label_set.end()) {
      throw ValidationError("document '" + d.issue_key + "' has label '" + *d.label +
                            "' outside the label set");
    }
    out.push_back(static_cast<int>(it - label_set.begin()));
  }
  return out;
}

ConfusionMatrix score(const TrainedModel& model, std::span<const TokenizedDocument> test,
                      std::span<const int> truth) {
  ConfusionMatrix cm(model.label_set());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto predicted = model.predict(tfidf(test[i], model.space())).argmax();
    cm.add(static_cast<std::size_t>(truth[i]), predicted);
  }
  return cm;
}

}  // namespace

EvaluationReport cross_validate(const ClassifierSpec& spec, std::span<const TokenizedDocument> docs,
                                const std::vector<std::string>& label_set,
                                const CrossValidationOptions& options) {
  spec.validate();
  options.text.resample.validate();
  if (options.folds < 2) throw ValidationError("folds must be >= 2", {{"folds", "must be >= 2"}});
  if (options.repeats < 1) {
    throw ValidationError("repeats must be >= 1", {{"repeats", "must be >= 1"}});
  }
  if (label_set.empty()) throw ValidationError("label set is empty");
  const auto labels = label_indices(docs, label_set);
  std::vector<std::size_t> counts(label_set.size(), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < static_cast<std::size_t>(options.folds)) {
      throw ValidationError("class '" + label_set[c] + "' has " + std::to_string(counts[c]) +
                            " instances, fewer than " + std::to_string(options.folds) + " folds");
    }
  }

  const std::size_t n_runs = static_cast<std::size_t>(options.folds * options.repeats);
  std::vector<RunResult> runs(n_runs);
  std::vector<ConfusionMatrix> confusions(n_runs, ConfusionMatrix(label_set));
  std::vector<std::vector<int>> assignments(static_cast<std::size_t>(options.repeats));
  for (int r = 0; r < options.repeats; ++r) {
    assignments[static_cast<std::size_t>(r)] =
        stratified_folds(labels, label_set.size(), options.folds, options.seed + static_cast<std::uint64_t>(r));
  }

  auto run_one = [&](std::size_t run) {
    const int r = static_cast<int>(run) / options.folds;
    const int f = static_cast<int>(run) % options.folds;
    const auto& fold = assignments[static_cast<std::size_t>(r)];
    std::vector<TokenizedDocument> train_docs, test_docs;
    std::vector<int> test_labels;
    for (std::size_t i = 0; i < docs.size(); ++i) {
      if (fold[i] == f) {
        test_docs.push_back(docs[i]);
        test_labels.push_back(labels[i]);
      } else {
        train_docs.push_back(docs[i]);
      }
    }
    ClassifierSpec run_spec = spec;
    run_spec.seed = derive_seed(spec.seed, run);
    TextModelOptions text = options.text;
    text.resample.seed = derive_seed(options.text.resample.seed, run);
    const TrainedModel model = fit_text_model(run_spec, train_docs, label_set, text);
    confusions[run] = score(model, test_docs, test_labels);
    const Metrics m = metrics(confusions[run]);
    runs[run] = {r, f, m.accuracy, m.weighted_f, train_docs.size(), test_docs.size()};
  };

  const auto threads =
      static_cast<std::size_t>(std::clamp<int>(options.threads, 1, static_cast<int>(n_runs)));
  if (threads == 1) {
    for (std::size_t run = 0; run < n_runs; ++run) run_one(run);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t run = w; run < n_runs; run += threads) run_one(run);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  EvaluationReport report;
  report.classifier = spec.describe();
  report.resample = std::string(to_string(options.text.resample.method));
  report.folds = options.folds;
  report.repeats = options.repeats;
  report.runs = std::move(runs);
  report.confusion = ConfusionMatrix(label_set);
  for (const auto& cm : confusions) report.confusion.merge(cm);

  Fnv fp;
  fp.add(report.classifier);
  fp.add(report.resample);
  fp.add(std::to_string(spec.seed));
  fp.add(std::to_string(options.seed));
  fp.add(std::to_string(options.folds) + "x" + std::to_string(options.repeats));
  fp.add(options.text.select_features ? "ig" : "all");
  for (const auto& d : docs) {
    fp.add(d.issue_key);
    fp.add(*d.label);
  }
  report.fingerprint = hex64(fp.h);
  summarize(report);
  return report;
}

// --- corrected resampled t-test -----------------------------------------------------

TTestResult corrected_t_test(std::span<const double> diffs, double test_train_ratio, double alpha) {
  const std::size_t k = diffs.size();
  if (k < 2) throw ValidationError("t-test needs at least two paired differences");
  if (!(test_train_ratio >= 0.0)) throw ValidationError("test/train ratio must be >= 0");
  const auto [mean, sd] = mean_std(diffs);
  const double var = sd * sd;
  TTestResult r;
  // Identical differences leave only rounding noise in the variance.
  if (sd <= 1e-12 * std::abs(mean)) {
    if (mean == 0.0) return r;
    r.infinite = true;
    r.t = mean > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    r.p = 0.0;
    r.significant = true;
    return r;
  }
  r.t = mean / std::sqrt((1.0 / static_cast<double>(k) + test_train_ratio) * var);
  const boost::math::students_t dist(static_cast<double>(k - 1));
  r.p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(r.t)));
  r.significant = r.p < alpha;
  return r;
}

// --- sliding windows --------------------------------------------------------------------

void WindowConfig::validate() const {
  std::vector<ValidationError::Field> bad;
  if (training_window <= Seconds::zero()) bad.push_back({"training_window", "must be positive"});
  if (testing_window <= Seconds::zero()) bad.push_back({"testing_window", "must be positive"});
  if (step && *step <= Seconds::zero()) bad.push_back({"step", "must be positive"});
  if (!bad.empty()) throw ValidationError("invalid window configuration", std::move(bad));
}

std::size_t window_count(Seconds span, Seconds train, Seconds test, Seconds step) {
  if (train <= Seconds::zero() || test <= Seconds::zero() || step <= Seconds::zero()) {
    throw ValidationError("window durations must be positive");
  }
  if (span < train + test) return 0;
  return static_cast<std::size_t>((span - train - test) / step) + 1;
}

std::vector<Window> plan_windows(Timestamp begin, Timestamp end, const WindowConfig& config) {
  config.validate();
  const Seconds step = config.effective_step();
  const std::size_t n = window_count(end - begin, config.training_window, config.testing_window, step);
  std::vector<Window> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Window w;
    w.train_begin = begin + step * static_cast<long long>(i);
    w.train_end = w.train_begin + config.training_window;
    w.test_begin = w.train_end;
    w.test_end = w.test_begin + config.testing_window;
    out.push_back(w);
  }
  return out;
}

SlidingWindowReport sliding_window_eval(const WindowTask& task, const IssueCorpus& corpus,
                                        const WindowConfig& config, const StopwordList& stopwords) {
  config.validate();
  task.classifier.validate();
  if (corpus.empty()) throw ValidationError("corpus is empty");
  const auto [begin, end] = corpus.span();
  if (end - begin < config.training_window + config.testing_window) {
    throw ValidationError("corpus spans less than one training plus testing window");
  }

  std::vector<TokenizedDocument> docs;
  docs.reserve(corpus.size());
  for (const auto& issue : corpus.issues()) docs.push_back(preprocess(issue, stopwords));
  const auto label_set = experiment_labels(task.experiment);

  // Issues are sorted by creation time, so each window is a contiguous range.
  auto first_at = [&](Timestamp t) {
    return static_cast<std::size_t>(
        std::lower_bound(corpus.issues().begin(), corpus.issues().end(), t,
                         [](const IssueRecord& r, Timestamp v) { return r.created < v; }) -
        corpus.issues().begin());
  };
  auto slice = [&](std::size_t from, std::size_t to) {
    return experiment_documents(std::span<const TokenizedDocument>(docs).subspan(from, to - from),
                                task.experiment);
  };

  SlidingWindowReport report;
  report.config = config;
  std::vector<double> acc, wf;
  for (const Window& w : plan_windows(begin, end, config)) {
    WindowEvaluation ev;
    ev.window = w;
    const std::size_t tr0 = first_at(w.train_begin);
    const std::size_t tr1 = first_at(w.train_end);
    // The last window also takes issues created at the corpus end.
    const std::size_t te1 = w.test_end == end ? corpus.size() : first_at(w.test_end);
    const auto train_docs = slice(tr0, tr1);
    const auto test_docs = slice(tr1, te1);
    ev.train_size = train_docs.size();
    ev.test_size = test_docs.size();

    std::vector<bool> seen(label_set.size(), false);
    const auto train_labels = label_indices(train_docs, label_set);
    for (int y : train_labels) seen[static_cast<std::size_t>(y)] = true;
    if (std::count(seen.begin(), seen.end(), true) < 2) {
      ev.skip_reason = "training window has fewer than two classes";
    } else if (test_docs.empty()) {
      ev.skip_reason = "no test issues";
    } else {
      try {
        const TrainedModel model =
            fit_text_model(task.classifier, train_docs, label_set, task.text, stopwords.fingerprint());
        const Metrics m = metrics(score(model, test_docs, label_indices(test_docs, label_set)));
        ev.evaluated = true;
        ev.accuracy = m.accuracy;
        ev.weighted_f = m.weighted_f;
        acc.push_back(m.accuracy);
        wf.push_back(m.weighted_f);
      } catch (const ValidationError& e) {
        ev.skip_reason = std::string("training failed: ") + e.what();
      }
    }
    report.windows.push_back(std::move(ev));
  }
  report.evaluated = acc.size();
  std::tie(report.mean_accuracy, report.std_accuracy) = mean_std(acc);
  std::tie(report.mean_weighted_f, report.std_weighted_f) = mean_std(wf);
  return report;
}

// --- effort savings -----------------------------------------------------------------

void SavingsParams::validate() const {
  std::vector<ValidationError::Field> bad;
  auto non_negative = [&](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) bad.push_back({name, "must be a non-negative number"});
  };
  non_negative(issues_per_day, "issues_per_day");
  non_negative(manual_seconds_per_issue, "manual_seconds_per_issue");
  non_negative(auto_ms_per_issue, "auto_ms_per_issue");
  non_negative(working_days_per_month, "working_days_per_month");
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) bad.push_back({"accuracy", "must be in [0, 1]"});
  if (!bad.empty()) throw ValidationError("invalid savings parameters", std::move(bad));
}

SavingsParams SavingsParams::paper_rq5() { return SavingsParams{}; }

SavingsReport effort_savings(const SavingsParams& p) {
  p.validate();
  SavingsReport r;
  const double expected = p.issues_per_day * p.accuracy;
  // The small slack keeps products such as 12 x 0.75 from flooring to 8.
  r.correct_per_day = p.rule == CorrectCountRule::floor_paper ? std::floor(expected + 1e-9) : expected;
  r.wrong_per_day = p.issues_per_day - r.correct_per_day;
  r.auto_seconds_per_day =
      r.correct_per_day * p.auto_ms_per_issue / 1000.0 + r.wrong_per_day * p.manual_seconds_per_issue;
  r.manual_seconds_per_day = p.issues_per_day * p.manual_seconds_per_issue;
  r.reduction_fraction =
      r.manual_seconds_per_day > 0.0 ? 1.0 - r.auto_seconds_per_day / r.manual_seconds_per_day : 0.0;
  r.monthly_hours_saved =
      (r.manual_seconds_per_day - r.auto_seconds_per_day) * p.working_days_per_month / 3600.0;
  return r;
}

// --- misassignment cost ----------------------------------------------------------------

double unit_cost(std::string_view predicted, std::string_view truth) {
  return predicted == truth ? 0.0 : 1.0;
}

CostFunction time_cost(double seconds_per_miss) {
  if (!(seconds_per_miss >= 0.0)) throw ValidationError("seconds per miss must be >= 0");
  return [seconds_per_miss](std::string_view predicted, std::string_view truth) {
    return predicted == truth ? 0.0 : seconds_per_miss;
  };
}

double misassignment_cost(std::span<const AssignmentResult> results,
                          std::span<const std::string> truth, const CostFunction& cost) {
  if (results.size() != truth.size()) {
    throw ValidationError("misassignment cost: " + std::to_string(results.size()) + " results but " +
                          std::to_string(truth.size()) + " truth labels");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) total += cost(results[i].subteam, truth[i]);
  return total;
}

}  // namespace triage
