// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "triage/textprep.hpp"

namespace triage {

using TermIndex = std::uint32_t;

// Sparse document vector; indices strictly increasing, no zero weights stored.
class SparseVector {
 public:
  struct Entry {
    TermIndex index;
    double weight;
    bool operator==(const Entry&) const = default;
  };

  SparseVector() = default;
  // Sorts by index, merges duplicates by summing, drops zeros.
  static SparseVector from_unsorted(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  double get(TermIndex index) const;
  double dot(const SparseVector& other) const;
  double norm() const;

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  bool operator==(const SparseVector&) const = default;

 private:
  std::vector<Entry> entries_;
};

double cosine_similarity(const SparseVector& a, const SparseVector& b);

// Vocabulary learned from training documents. Terms are ordered
// lexicographically, so the space is independent of document order.
class FeatureSpace {
 public:
  FeatureSpace() = default;
  FeatureSpace(std::vector<std::string> terms, std::vector<std::uint32_t> doc_freq,
               std::size_t n_docs, std::vector<TermIndex> selected);

  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::uint32_t>& doc_freq() const { return doc_freq_; }
  std::size_t n_docs() const { return n_docs_; }
  std::size_t dimension() const { return terms_.size(); }
  // Indices of features kept by selection (all terms right after build_space).
  const std::vector<TermIndex>& selected() const { return selected_; }
  bool is_selected(TermIndex index) const { return selected_mask_[index]; }

  // Index of a term, or -1.
  long long find(std::string_view term) const;
  // ln(n_docs / doc_freq[index])
  double idf(TermIndex index) const;

  FeatureSpace with_selection(std::vector<TermIndex> selected) const;

  bool operator==(const FeatureSpace& other) const;

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint32_t> doc_freq_;
  std::size_t n_docs_ = 0;
  std::vector<TermIndex> selected_;
  std::vector<bool> selected_mask_;
};

// Throws ValidationError("empty vocabulary") when docs is empty or every document is.
FeatureSpace build_space(std::span<const TokenizedDocument> docs);

// weight(t) = tf(t, doc) * ln(n_docs / df(t)); terms unknown to the space or not
// selected are ignored.
SparseVector tfidf(const TokenizedDocument& doc, const FeatureSpace& space);
SparseVector tfidf(std::span<const std::string> tokens, const FeatureSpace& space);

struct LabeledDataset {
  std::vector<SparseVector> vectors;
  std::vector<int> labels;  // indices into label_set
  std::shared_ptr<const FeatureSpace> space;
  std::vector<std::string> label_set;

  std::size_t size() const { return vectors.size(); }
  bool empty() const { return vectors.empty(); }
  std::vector<std::size_t> class_counts() const;
  // Throws ValidationError when vectors/labels disagree or a label is out of range.
  void validate() const;
};

// Vectorizes documents against `space`. Labels come from doc.label and are mapped
// onto label_set; a missing or unknown label throws ValidationError.
LabeledDataset make_dataset(std::span<const TokenizedDocument> docs,
                            std::shared_ptr<const FeatureSpace> space,
                            std::vector<std::string> label_set);

// Shannon entropy, bits, of a count vector.
double entropy_bits(std::span<const std::size_t> counts);

// Information gain (bits) of binary occurrence (weight > 0) of every term in the
// space: H(labels) - H(labels | present/absent). Indexed by term.
std::vector<double> info_gain(const LabeledDataset& data);

// Keeps the selected terms whose IG exceeds `threshold`. Gains within 1e-12 of
// zero count as zero. Throws ValidationError("no features selected") when
// nothing survives.
FeatureSpace info_gain_select(const LabeledDataset& data, double threshold = 0.0);

}  // namespace triage
