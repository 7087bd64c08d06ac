// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "json.hpp"
#include "oracles.hpp"
#include "support.hpp"
#include "triage/error.hpp"
#include "triage/evaluate.hpp"

namespace triage {
namespace {

TEST(Metrics, TwoClassExample) {
  ConfusionMatrix cm({"A", "B"});
  cm.add(0, 0, 8);
  cm.add(0, 1, 2);
  cm.add(1, 0, 4);
  cm.add(1, 1, 6);
  const auto m = metrics(cm);
  EXPECT_NEAR(m.accuracy, 0.7, 1e-12);
  EXPECT_NEAR(m.per_class[0].precision, 8.0 / 12.0, 1e-12);
  EXPECT_NEAR(m.per_class[0].recall, 0.8, 1e-12);
  EXPECT_NEAR(m.per_class[0].f_measure, 0.727, 1e-3);
  EXPECT_NEAR(m.per_class[1].f_measure, 0.667, 1e-3);
  EXPECT_NEAR(m.weighted_f, 0.697, 1e-3);
}

TEST(Metrics, NeverPredictedClassAndEmpty) {
  ConfusionMatrix cm({"A", "B"});
  cm.add(0, 0, 5);
  cm.add(1, 0, 5);
  const auto m = metrics(cm);
  EXPECT_EQ(m.per_class[1].precision, 0.0);
  EXPECT_EQ(m.per_class[1].f_measure, 0.0);
  EXPECT_THROW(metrics(ConfusionMatrix({"A", "B"})), ValidationError);
}

TEST(Folds, StratifiedAndDeterministic) {
  std::vector<int> labels;
  for (int i = 0; i < 53; ++i) labels.push_back(i % 3 == 0 ? 1 : 0);
  const auto f = stratified_folds(labels, 2, 5, 7);
  EXPECT_EQ(f, stratified_folds(labels, 2, 5, 7));
  for (int c = 0; c < 2; ++c) {
    std::vector<int> per_fold(5, 0);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) ++per_fold[static_cast<std::size_t>(f[i])];
    }
    EXPECT_LE(*std::max_element(per_fold.begin(), per_fold.end()) -
                  *std::min_element(per_fold.begin(), per_fold.end()),
              1);
  }
  EXPECT_THROW(stratified_folds(labels, 2, 1, 7), ValidationError);
}

TEST(CrossValidation, RejectsClassSmallerThanFolds) {
  std::vector<TokenizedDocument> docs;
  for (int i = 0; i < 20; ++i) docs.push_back(testing::doc({"aaa"}, "x"));
  for (int i = 0; i < 3; ++i) docs.push_back(testing::doc({"bbb"}, "y"));
  CrossValidationOptions opt;
  opt.folds = 5;
  opt.repeats = 1;
  try {
    cross_validate(ClassifierSpec{}, docs, {"x", "y"}, opt);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("'y'"), std::string::npos) << e.what();
  }
}

TEST(CrossValidation, ZeroRMatchesClassShare) {
  std::vector<TokenizedDocument> docs;
  for (int i = 0; i < 70; ++i) docs.push_back(testing::doc({"aaa", "ccc"}, "x"));
  for (int i = 0; i < 30; ++i) docs.push_back(testing::doc({"bbb", "ccc"}, "y"));
  CrossValidationOptions opt;
  opt.folds = 10;
  opt.repeats = 3;
  const auto r = cross_validate(ClassifierSpec{}, docs, {"x", "y"}, opt);
  EXPECT_EQ(r.runs.size(), 30u);
  EXPECT_NEAR(r.mean_accuracy, 0.7, 1e-12);
  EXPECT_EQ(r.confusion.total(), 300u);
}

// --- corrected t-test --------------------------------------------------------

TEST(TTest, MatchesReferenceValues) {
  const auto ref = nlohmann::json::parse(testing::read_text(testing::data_dir() / "ttest_reference.json"));
  ASSERT_EQ(ref.at("cases").size(), 50u);
  for (const auto& c : ref.at("cases")) {
    const auto diffs = c.at("diffs").get<std::vector<double>>();
    const auto r = corrected_t_test(diffs, c.at("ratio").get<double>());
    EXPECT_NEAR(r.t, c.at("t").get<double>(), 1e-6);
    EXPECT_NEAR(r.p, c.at("p").get<double>(), 1e-6);
  }
  const auto& h = ref.at("hundred");
  const auto r = corrected_t_test(h.at("diffs").get<std::vector<double>>(), 1.0 / 9.0);
  EXPECT_NEAR(r.t, 0.75584683740791, 1e-6);
  EXPECT_NEAR(r.p, 0.451535744467191, 1e-6);
  EXPECT_FALSE(r.significant);
}

TEST(TTest, ZeroRatioIsPairedT) {
  Rng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> d(2 + rng.index(30));
    for (auto& x : d) x = rng.uniform() - 0.4;
    double mean = 0;
    for (double x : d) mean += x;
    mean /= static_cast<double>(d.size());
    double ss = 0;
    for (double x : d) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(d.size() - 1));
    const double t = mean / (sd / std::sqrt(static_cast<double>(d.size())));
    EXPECT_NEAR(corrected_t_test(d, 0.0).t, t, 1e-9 * std::max(1.0, std::abs(t)));
  }
}

TEST(TTest, ZeroVariance) {
  const std::vector<double> zeros(10, 0.0);
  const auto a = corrected_t_test(zeros, 0.1);
  EXPECT_EQ(a.t, 0.0);
  EXPECT_EQ(a.p, 1.0);
  EXPECT_FALSE(a.significant);
  const std::vector<double> constant(10, 0.02);
  const auto b = corrected_t_test(constant, 0.1);
  EXPECT_TRUE(b.infinite);
  EXPECT_TRUE(b.significant);
  EXPECT_THROW(corrected_t_test(std::vector<double>{0.1}, 0.1), ValidationError);
}

// --- sliding windows ----------------------------------------------------------

TEST(Windows, CountMatchesEnumerationOnGrid) {
  std::size_t fixtures = 0;
  for (long long span : {10LL, 52LL, 60LL, 104LL, 139LL}) {
    for (long long train : {1LL, 4LL, 26LL, 52LL, 53LL}) {
      for (long long test : {1LL, 4LL}) {
        const Seconds s = weeks(span), tr = weeks(train), te = weeks(test);
        EXPECT_EQ(window_count(s, tr, te, te), oracle::window_count(span, train, test, test))
            << span << " " << train << " " << test;
        const Timestamp begin = *parse_iso8601("2018-01-01");
        const auto windows = plan_windows(begin, begin + s, WindowConfig{tr, te, std::nullopt});
        EXPECT_EQ(windows.size(), oracle::window_count(span, train, test, test));
        for (const auto& w : windows) {
          EXPECT_EQ(w.train_end, w.test_begin);
          EXPECT_LT(w.train_begin, w.train_end);
          EXPECT_LT(w.test_begin, w.test_end);
          EXPECT_LE(w.test_end, begin + s);
        }
        ++fixtures;
      }
    }
  }
  EXPECT_EQ(fixtures, 50u);
  EXPECT_THROW(window_count(weeks(5), weeks(0), weeks(1), weeks(1)), ValidationError);
}

TEST(Windows, EvaluationKeepsTrainAndTestApart) {
  auto spec = testing::noise_free_spec();
  for (auto& s : spec.subteams) s.count /= 10;
  const auto corpus = generate_synthetic(spec, 3);
  WindowTask task;
  task.experiment = Experiment::E2;
  task.classifier.kind = ClassifierKind::naive_bayes_multinomial;
  const WindowConfig cfg{weeks(26), weeks(8), std::nullopt};
  const auto report = sliding_window_eval(task, corpus, cfg);
  const auto [begin, end] = corpus.span();
  EXPECT_EQ(report.windows.size(), window_count(end - begin, cfg.training_window, cfg.testing_window,
                                                cfg.effective_step()));
  for (const auto& w : report.windows) {
    std::size_t train = 0, test = 0;
    for (const auto& issue : corpus.issues()) {
      if (issue.created >= w.window.train_begin && issue.created < w.window.train_end) ++train;
      const bool last = w.window.test_end == end;
      if (issue.created >= w.window.test_begin &&
          (issue.created < w.window.test_end || (last && issue.created == end))) {
        ++test;
      }
    }
    EXPECT_EQ(w.train_size, train);
    EXPECT_EQ(w.test_size, test);
    if (w.evaluated) {
      EXPECT_GE(w.accuracy, 0.0);
      EXPECT_LE(w.accuracy, 1.0);
    }
  }
  EXPECT_GT(report.evaluated, 0u);
  EXPECT_THROW(sliding_window_eval(task, corpus, WindowConfig{weeks(500), weeks(1), std::nullopt}),
               ValidationError);
}

// --- savings and cost ------------------------------------------------------------

TEST(Savings, PublishedProfile) {
  const auto r = effort_savings(SavingsParams::paper_rq5());
  EXPECT_NEAR(r.auto_seconds_per_day, 2341.45, 0.01);
  EXPECT_EQ(r.manual_seconds_per_day, 9360.0);
  EXPECT_NEAR(r.reduction_fraction, 0.7498, 1e-4);
  EXPECT_EQ(r.correct_per_day, 9.0);
}

TEST(Savings, Extremes) {
  auto p = SavingsParams::paper_rq5();
  p.accuracy = 1.0;
  EXPECT_NEAR(effort_savings(p).auto_seconds_per_day, 1.9386, 1e-9);
  p.accuracy = 0.0;
  EXPECT_NEAR(effort_savings(p).auto_seconds_per_day, 9360.0, 1e-9);
  p.accuracy = 1.5;
  EXPECT_THROW(effort_savings(p), ValidationError);
  p = SavingsParams::paper_rq5();
  p.rule = CorrectCountRule::exact;
  EXPECT_NEAR(effort_savings(p).correct_per_day, 12 * 0.8163, 1e-12);
}

AssignmentResult predicted(std::string subteam) {
  AssignmentResult r;
  r.subteam = std::move(subteam);
  return r;
}

TEST(Cost, ThreeMissesAtFixedTime) {
  const std::vector<AssignmentResult> results{predicted("ST1"), predicted("ST2"), predicted("ST3"),
                                              predicted("ST4")};
  const std::vector<std::string> truth{"ST2", "ST3", "ST1", "ST4"};
  EXPECT_EQ(misassignment_cost(results, truth, time_cost(780.0)), 2340.0);
  EXPECT_EQ(misassignment_cost(results, truth), 3.0);
  EXPECT_THROW(misassignment_cost(results, std::span(truth).first(2)), ValidationError);
  EXPECT_THROW(time_cost(-1.0), ValidationError);
}

}  // namespace
}  // namespace triage
