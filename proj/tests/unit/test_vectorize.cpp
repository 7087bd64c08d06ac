// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "oracles.hpp"
#include "support.hpp"
#include "triage/error.hpp"

namespace triage {
namespace {

using testing::doc;

TEST(Space, BuildCountsDocumentFrequency) {
  const std::vector<TokenizedDocument> docs{doc({"abc"}), doc({"abc", "def", "abc"})};
  const auto s = build_space(docs);
  EXPECT_EQ(s.terms(), (std::vector<std::string>{"abc", "def"}));
  EXPECT_EQ(s.doc_freq(), (std::vector<std::uint32_t>{2, 1}));
  EXPECT_EQ(s.n_docs(), 2u);
  EXPECT_EQ(s.selected().size(), 2u);
}

TEST(Space, SingleDocAndOrderIndependence) {
  const auto s = build_space(std::vector{doc({"z", "y", "z"})});
  for (auto df : s.doc_freq()) EXPECT_EQ(df, 1u);
  std::vector<TokenizedDocument> docs{doc({"q", "r"}), doc({"r", "s"}), doc({"t"})};
  const auto a = build_space(docs);
  std::reverse(docs.begin(), docs.end());
  EXPECT_EQ(build_space(docs), a);
}

TEST(Space, EmptyVocabulary) {
  EXPECT_THROW(build_space(std::vector<TokenizedDocument>{}), ValidationError);
  EXPECT_THROW(build_space(std::vector{doc({}), doc({})}), ValidationError);
}

TEST(Tfidf, Formula) {
  const std::vector<TokenizedDocument> docs{doc({"rare", "common"}), doc({"common"}), doc({"common"}),
                                            doc({"common"})};
  const auto s = build_space(docs);
  const auto v = tfidf(doc({"rare", "rare", "rare", "common", "unseen"}), s);
  ASSERT_EQ(v.nnz(), 1u);
  EXPECT_NEAR(v.get(static_cast<TermIndex>(s.find("rare"))), 3.0 * std::log(4.0), 1e-12);
  EXPECT_NEAR(3.0 * std::log(4.0), 4.1589, 1e-4);
  EXPECT_EQ(v.get(static_cast<TermIndex>(s.find("common"))), 0.0);
  EXPECT_TRUE(tfidf(doc({}), s).empty());
}

TEST(Tfidf, MatchesBruteForceOnRandomCorpora) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TokenizedDocument> docs;
    const std::size_t n = 1 + rng.index(8);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> toks;
      for (std::size_t k = 1 + rng.index(6); k > 0; --k) toks.push_back(std::string(1, static_cast<char>('a' + rng.index(5))));
      docs.push_back(doc(toks));
    }
    // Duplicating a document must raise df of its terms by one.
    auto with_dup = docs;
    with_dup.push_back(docs[0]);
    const auto s = build_space(docs);
    const auto s2 = build_space(with_dup);
    for (std::size_t t = 0; t < s.dimension(); ++t) {
      std::size_t df = 0;
      for (const auto& d : docs) df += std::count(d.tokens.begin(), d.tokens.end(), s.terms()[t]) > 0;
      EXPECT_EQ(s.doc_freq()[t], df);
      const bool in_first = std::count(docs[0].tokens.begin(), docs[0].tokens.end(), s.terms()[t]) > 0;
      EXPECT_EQ(s2.doc_freq()[static_cast<std::size_t>(s2.find(s.terms()[t]))], df + (in_first ? 1 : 0));
    }
    for (const auto& d : docs) {
      const auto v = tfidf(d, s);
      for (std::size_t t = 0; t < s.dimension(); ++t) {
        const double tf = static_cast<double>(std::count(d.tokens.begin(), d.tokens.end(), s.terms()[t]));
        const double expect = tf * std::log(static_cast<double>(n) / s.doc_freq()[t]);
        EXPECT_NEAR(v.get(static_cast<TermIndex>(t)), expect, 1e-12);
        EXPECT_GE(v.get(static_cast<TermIndex>(t)), 0.0);
      }
    }
  }
}

TEST(Sparse, FromUnsortedAndDot) {
  const auto a = SparseVector::from_unsorted({{3, 1.0}, {1, 2.0}, {3, 1.0}, {5, 0.0}});
  ASSERT_EQ(a.nnz(), 2u);
  EXPECT_EQ(a.entries()[0].index, 1u);
  EXPECT_EQ(a.get(3), 2.0);
  const auto b = SparseVector::from_unsorted({{3, 4.0}, {7, 1.0}});
  EXPECT_EQ(a.dot(b), 8.0);
  EXPECT_NEAR(cosine_similarity(a, a), 1.0, 1e-12);
  EXPECT_EQ(cosine_similarity(a, SparseVector{}), 0.0);
}

// --- information gain -------------------------------------------------------------------------

LabeledDataset occurrence_dataset(const std::vector<std::vector<int>>& present, const std::vector<int>& labels,
                                  std::size_t dim, std::size_t classes) {
  std::vector<std::string> terms;
  for (std::size_t t = 0; t < dim; ++t) terms.push_back("f" + std::to_string(t));
  LabeledDataset d;
  std::vector<TermIndex> sel;
  for (std::size_t t = 0; t < dim; ++t) sel.push_back(static_cast<TermIndex>(t));
  d.space = std::make_shared<const FeatureSpace>(terms, std::vector<std::uint32_t>(dim, 1), present.size(), sel);
  for (std::size_t c = 0; c < classes; ++c) d.label_set.push_back("L" + std::to_string(c));
  for (std::size_t i = 0; i < present.size(); ++i) {
    std::vector<SparseVector::Entry> e;
    for (int t : present[i]) e.push_back({static_cast<TermIndex>(t), 1.0});
    d.vectors.push_back(SparseVector::from_unsorted(e));
  }
  d.labels = labels;
  return d;
}

TEST(InfoGain, Examples) {
  // 8 docs, labels 4/4, feature 0 in 3 of class A and 1 of class B.
  const auto d = occurrence_dataset({{0}, {0}, {0}, {}, {0}, {}, {}, {}}, {0, 0, 0, 0, 1, 1, 1, 1}, 1, 2);
  EXPECT_NEAR(info_gain(d)[0], 0.1887, 1e-4);
  EXPECT_NEAR(info_gain(d)[0], oracle::info_gain(d, 0), 1e-12);

  const auto perfect = occurrence_dataset({{0}, {0}, {}, {}}, {0, 0, 1, 1}, 1, 2);
  EXPECT_NEAR(info_gain(perfect)[0], 1.0, 1e-12);

  const auto everywhere = occurrence_dataset({{0}, {0}, {0}, {0}}, {0, 0, 1, 1}, 1, 2);
  EXPECT_NEAR(info_gain(everywhere)[0], 0.0, 1e-12);
  EXPECT_THROW(info_gain_select(everywhere), ValidationError);

  const auto single = occurrence_dataset({{0}, {}}, {0, 0}, 1, 2);
  EXPECT_NEAR(info_gain(single)[0], 0.0, 1e-12);
}

TEST(InfoGain, BoundsOnFuzzedData) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto d = testing::random_dataset(rng, 2 + rng.index(40), 2 + rng.index(4), 1 + rng.index(12));
    const auto counts = d.class_counts();
    const double hy = entropy_bits(counts);
    for (double g : info_gain(d)) {
      EXPECT_GE(g, -1e-12);
      EXPECT_LE(g, hy + 1e-12);
    }
  }
}

// Random datasets of up to 8 documents and 4 features, up to 3 classes.
TEST(InfoGain, SelectionMatchesBruteForce) {
  Rng rng(17);
  std::size_t compared = 0;
  for (int trial = 0; trial < 4000; ++trial) {
    const std::size_t n = 1 + rng.index(8);
    const std::size_t dim = 1 + rng.index(4);
    const std::size_t classes = 1 + rng.index(3);
    std::vector<std::vector<int>> present(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(rng.index(classes));
      for (std::size_t t = 0; t < dim; ++t) {
        if (rng.index(2)) present[i].push_back(static_cast<int>(t));
      }
    }
    const auto d = occurrence_dataset(present, labels, dim, classes);
    const double threshold = rng.index(3) == 0 ? 0.05 * static_cast<double>(rng.index(10)) : 0.0;
    std::vector<TermIndex> expected;
    for (std::size_t t = 0; t < dim; ++t) {
      double g = oracle::info_gain(d, static_cast<TermIndex>(t));
      if (std::abs(g) < 1e-12) g = 0.0;
      if (g > threshold) expected.push_back(static_cast<TermIndex>(t));
    }
    if (expected.empty()) {
      EXPECT_THROW(info_gain_select(d, threshold), ValidationError);
    } else {
      EXPECT_EQ(info_gain_select(d, threshold).selected(), expected);
    }
    ++compared;
  }
  EXPECT_EQ(compared, 4000u);
}

TEST(InfoGain, SelectionMonotoneInThreshold) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = testing::random_dataset(rng, 30, 3, 10);
    std::size_t prev = d.space->dimension() + 1;
    for (double th : {0.0, 0.01, 0.05, 0.1, 0.2, 0.4}) {
      std::size_t kept = 0;
      try {
        kept = info_gain_select(d, th).selected().size();
      } catch (const ValidationError&) {
      }
      EXPECT_LE(kept, prev);
      prev = kept;
    }
  }
}

TEST(Dataset, MakeDatasetValidatesLabels) {
  const std::vector<TokenizedDocument> docs{doc({"a"}, "x"), doc({"b"}, "y")};
  auto space = std::make_shared<const FeatureSpace>(build_space(docs));
  const auto d = make_dataset(docs, space, {"x", "y"});
  EXPECT_EQ(d.labels, (std::vector<int>{0, 1}));
  EXPECT_THROW(make_dataset(docs, space, {"x"}), ValidationError);
  EXPECT_THROW(make_dataset(std::vector{doc({"a"})}, space, {"x"}), ValidationError);
}

}  // namespace
}  // namespace triage
