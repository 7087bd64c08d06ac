// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "triage/assign.hpp"
#include "triage/corpus.hpp"
#include "triage/learners.hpp"
#include "triage/resample.hpp"

namespace triage {

class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::vector<std::string> label_set);

  void add(std::size_t truth, std::size_t predicted, std::size_t count = 1);
  void merge(const ConfusionMatrix& other);

  const std::vector<std::string>& label_set() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t at(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * labels_.size() + predicted];
  }
  std::size_t total() const;
  std::size_t trace() const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<std::size_t> counts_;  // row = truth, column = prediction
};

struct ClassMetrics {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
  std::size_t support = 0;
};

struct Metrics {
  double accuracy = 0.0;
  double weighted_f = 0.0;  // support-weighted mean of per-class F
  double macro_f = 0.0;
  std::vector<ClassMetrics> per_class;
};

// F = 2PR/(P+R), 0 when P+R = 0; a class never predicted has P = 0.
// Throws ValidationError on an empty matrix.
Metrics metrics(const ConfusionMatrix& cm);

struct RunResult {
  int repeat = 0;
  int fold = 0;
  double accuracy = 0.0;
  double weighted_f = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

struct EvaluationReport {
  std::string classifier;      // ClassifierSpec::describe()
  std::string resample;        // resample method name
  std::string fingerprint;     // hash of the configuration and data
  int folds = 0;
  int repeats = 0;
  std::vector<RunResult> runs;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double mean_weighted_f = 0.0;
  double std_weighted_f = 0.0;
  double macro_f = 0.0;  // pooled
  std::vector<ClassMetrics> per_class;  // pooled
  ConfusionMatrix confusion{{}};

  std::vector<double> accuracies() const;
};

// Fills mean/std and pooled metrics from runs and the pooled confusion matrix.
void summarize(EvaluationReport& report);

struct CrossValidationOptions {
  int folds = 10;
  int repeats = 10;
  std::uint64_t seed = 1;
  TextModelOptions text;  // feature selection + resampling, fit on training folds only
  int threads = 1;
};

// Stratified assignment of instances to folds: per class, a seeded shuffle then
// round-robin dealing. Returns the fold of every instance.
std::vector<int> stratified_folds(std::span<const int> labels, std::size_t n_classes, int folds,
                                  std::uint64_t seed);

// Repeated stratified k-fold cross-validation over labeled token documents.
// Repeat r uses seed + r. Throws ValidationError naming the offending class
// when a class has fewer instances than folds.
EvaluationReport cross_validate(const ClassifierSpec& spec, std::span<const TokenizedDocument> docs,
                                const std::vector<std::string>& label_set,
                                const CrossValidationOptions& options);

struct TTestResult {
  double t = 0.0;
  double p = 1.0;
  bool significant = false;
  bool infinite = false;  // zero variance with non-zero mean
};

// Nadeau-Bengio corrected resampled t-test:
// t = mean(d) / sqrt((1/k + test_train_ratio) * var(d)), two-sided p from
// Student t with k - 1 degrees of freedom. Throws ValidationError when k < 2.
TTestResult corrected_t_test(std::span<const double> diffs, double test_train_ratio,
                             double alpha = 0.05);

struct WindowConfig {
  Seconds training_window = weeks(26);
  Seconds testing_window = weeks(1);
  std::optional<Seconds> step;  // defaults to testing_window

  Seconds effective_step() const { return step.value_or(testing_window); }
  void validate() const;
};

struct Window {
  Timestamp train_begin;
  Timestamp train_end;  // exclusive; equals test_begin
  Timestamp test_begin;
  Timestamp test_end;   // exclusive, except for the window ending at the corpus end
};

// floor((span - train - test) / step) + 1, or 0 when the span is too short.
std::size_t window_count(Seconds span, Seconds train, Seconds test, Seconds step);
std::vector<Window> plan_windows(Timestamp begin, Timestamp end, const WindowConfig& config);

struct WindowTask {
  Experiment experiment = Experiment::E1;
  ClassifierSpec classifier;
  TextModelOptions text;
};

struct WindowEvaluation {
  Window window;
  bool evaluated = false;
  std::string skip_reason;  // set when evaluated is false
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double accuracy = 0.0;
  double weighted_f = 0.0;
};

struct SlidingWindowReport {
  WindowConfig config;
  std::vector<WindowEvaluation> windows;
  std::size_t evaluated = 0;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  double mean_weighted_f = 0.0;
  double std_weighted_f = 0.0;
};

// Trains on each training window and tests on the window right after it.
// Windows without two training classes or without test issues are kept in the
// output with a skip reason. Throws ValidationError when the corpus is shorter
// than one training + testing window.
SlidingWindowReport sliding_window_eval(const WindowTask& task, const IssueCorpus& corpus,
                                        const WindowConfig& config,
                                        const StopwordList& stopwords = StopwordList::rainbow());

// --- effort savings -----------------------------------------------------------

enum class CorrectCountRule { floor_paper, exact };

struct SavingsParams {
  double issues_per_day = 12.0;
  double manual_seconds_per_issue = 780.0;
  double auto_ms_per_issue = 161.55;
  double accuracy = 0.8163;
  CorrectCountRule rule = CorrectCountRule::floor_paper;
  // 696 working days over January 2018 .. August 2020 (32 months).
  double working_days_per_month = 696.0 / 32.0;

  void validate() const;
  static SavingsParams paper_rq5();
};

struct SavingsReport {
  double correct_per_day = 0.0;
  double wrong_per_day = 0.0;
  double auto_seconds_per_day = 0.0;  // auto time + manual correction of misses
  double manual_seconds_per_day = 0.0;
  double reduction_fraction = 0.0;
  double monthly_hours_saved = 0.0;
};

// Reference reduction figures quoted for these same inputs. Neither follows from the
// inputs; they are carried only to be reported next to the computed value.
inline constexpr double kReportedReductionResults = 0.7562;
inline constexpr double kReportedReductionLessons = 0.7998;

SavingsReport effort_savings(const SavingsParams& p);

// --- misassignment cost -------------------------------------------------------

using CostFunction = std::function<double(std::string_view predicted, std::string_view truth)>;

double unit_cost(std::string_view predicted, std::string_view truth);
CostFunction time_cost(double seconds_per_miss);

// Sum of cost(result.subteam, truth[i]). Throws ValidationError on length mismatch.
double misassignment_cost(std::span<const AssignmentResult> results,
                          std::span<const std::string> truth,
                          const CostFunction& cost = unit_cost);

}  // namespace triage
