// SPDX-License-Identifier: Apache-2.0
#include "triage/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "triage/error.hpp"

namespace triage {

// --- SparseVector --------------------------------------------------------------

SparseVector SparseVector::from_unsorted(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.index < b.index; });
  SparseVector v;
  v.entries_.reserve(entries.size());
  for (const auto& e : entries) {
    if (!v.entries_.empty() && v.entries_.back().index == e.index) {
      v.entries_.back().weight += e.weight;
    } else {
      v.entries_.push_back(e);
    }
  }
  std::erase_if(v.entries_, [](const Entry& e) { return e.weight == 0.0; });
  return v;
}

double SparseVector::get(TermIndex index) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const Entry& e, TermIndex i) { return e.index < i; });
  return it != entries_.end() && it->index == index ? it->weight : 0.0;
}

double SparseVector::dot(const SparseVector& other) const {
  double sum = 0.0;
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() && b != other.entries_.end()) {
    if (a->index < b->index) {
      ++a;
    } else if (b->index < a->index) {
      ++b;
    } else {
      sum += a->weight * b->weight;
      ++a;
      ++b;
    }
  }
  return sum;
}

double SparseVector::norm() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.weight * e.weight;
  return std::sqrt(s);
}

double cosine_similarity(const SparseVector& a, const SparseVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

// --- FeatureSpace ------------------------------------------------------------------

FeatureSpace::FeatureSpace(std::vector<std::string> terms, std::vector<std::uint32_t> doc_freq,
                           std::size_t n_docs, std::vector<TermIndex> selected)
    : terms_(std::move(terms)),
      doc_freq_(std::move(doc_freq)),
      n_docs_(n_docs),
      selected_(std::move(selected)),
      selected_mask_(terms_.size(), false) {
  if (terms_.size() != doc_freq_.size()) {
    throw ValidationError("feature space: terms and doc_freq differ in length");
  }
  if (!std::is_sorted(terms_.begin(), terms_.end()) ||
      std::adjacent_find(terms_.begin(), terms_.end()) != terms_.end()) {
    throw ValidationError("feature space: terms must be unique and sorted");
  }
  for (std::uint32_t df : doc_freq_) {
    if (df < 1 || df > n_docs_) throw ValidationError("feature space: doc_freq out of range");
  }
  std::sort(selected_.begin(), selected_.end());
  selected_.erase(std::unique(selected_.begin(), selected_.end()), selected_.end());
  for (TermIndex i : selected_) {
    if (i >= terms_.size()) throw ValidationError("feature space: selected index out of range");
    selected_mask_[i] = true;
  }
}

long long FeatureSpace::find(std::string_view term) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), term);
  if (it == terms_.end() || *it != term) return -1;
  return it - terms_.begin();
}

double FeatureSpace::idf(TermIndex index) const {
  return std::log(static_cast<double>(n_docs_) / static_cast<double>(doc_freq_[index]));
}

FeatureSpace FeatureSpace::with_selection(std::vector<TermIndex> selected) const {
  return FeatureSpace(terms_, doc_freq_, n_docs_, std::move(selected));
}

bool FeatureSpace::operator==(const FeatureSpace& other) const {
  return terms_ == other.terms_ && doc_freq_ == other.doc_freq_ && n_docs_ == other.n_docs_ &&
         selected_ == other.selected_;
}

FeatureSpace build_space(std::span<const TokenizedDocument> docs) {
  std::map<std::string, std::uint32_t, std::less<>> df;
  for (const auto& doc : docs) {
    std::vector<std::string_view> unique(doc.tokens.begin(), doc.tokens.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (auto t : unique) {
      auto it = df.find(t);
      if (it == df.end()) {
        df.emplace(std::string(t), 1u);
      } else {
        ++it->second;
      }
    }
  }
  if (df.empty()) throw ValidationError("empty vocabulary");
  std::vector<std::string> terms;
  std::vector<std::uint32_t> freq;
  terms.reserve(df.size());
  freq.reserve(df.size());
  for (auto& [term, n] : df) {
    terms.push_back(term);
    freq.push_back(n);
  }
  std::vector<TermIndex> all(terms.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<TermIndex>(i);
  return FeatureSpace(std::move(terms), std::move(freq), docs.size(), std::move(all));
}

SparseVector tfidf(std::span<const std::string> tokens, const FeatureSpace& space) {
  std::vector<SparseVector::Entry> counts;
  counts.reserve(tokens.size());
  for (const auto& t : tokens) {
    const long long idx = space.find(t);
    if (idx < 0 || !space.is_selected(static_cast<TermIndex>(idx))) continue;
    counts.push_back({static_cast<TermIndex>(idx), 1.0});
  }
  SparseVector tf = SparseVector::from_unsorted(std::move(counts));
  std::vector<SparseVector::Entry> weighted;
  weighted.reserve(tf.nnz());
  for (const auto& e : tf) weighted.push_back({e.index, e.weight * space.idf(e.index)});
  return SparseVector::from_unsorted(std::move(weighted));
}

SparseVector tfidf(const TokenizedDocument& doc, const FeatureSpace& space) {
  return tfidf(std::span<const std::string>(doc.tokens), space);
}

// --- LabeledDataset ----------------------------------------------------------------

std::vector<std::size_t> LabeledDataset::class_counts() const {
  std::vector<std::size_t> counts(label_set.size(), 0);
  for (int y : labels) ++counts[static_cast<std::size_t>(y)];
  return counts;
}

void LabeledDataset::validate() const {
  if (vectors.size() != labels.size()) {
    throw ValidationError("dataset: vectors and labels differ in length");
  }
  for (int y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= label_set.size()) {
      throw ValidationError("dataset: label index out of range");
    }
  }
}

LabeledDataset make_dataset(std::span<const TokenizedDocument> docs,
                            std::shared_ptr<const FeatureSpace> space,
                            std::vector<std::string> label_set) {
  LabeledDataset data;
  data.space = std::move(space);
  data.label_set = std::move(label_set);
  data.vectors.reserve(docs.size());
  data.labels.reserve(docs.size());
  for (const auto& doc : docs) {
    if (!doc.label) throw ValidationError("document '" + doc.issue_key + "' has no label");
    auto it = std::find(data.label_set.begin(), data.label_set.end(), *doc.label);
    if (it == data.label_set.end()) {
      throw ValidationError("document '" + doc.issue_key + "' has label '" + *doc.label +
                            "' outside the label set");
    }
    data.vectors.push_back(tfidf(doc, *data.space));
    data.labels.push_back(static_cast<int>(it - data.label_set.begin()));
  }
  return data;
}

// --- information gain ----------------------------------------------------------------

double entropy_bits(std::span<const std::size_t> counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  if (total == 0) return 0.0;
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h;
}

std::vector<double> info_gain(const LabeledDataset& data) {
  if (data.empty()) throw ValidationError("info gain: dataset is empty");
  data.validate();
  const std::size_t dim = data.space ? data.space->dimension() : 0;
  const std::size_t k = data.label_set.size();
  const auto totals = data.class_counts();
  const double h = entropy_bits(totals);
  const double n = static_cast<double>(data.size());

  // present[t * k + c]: documents of class c in which term t is non-zero.
  std::vector<std::size_t> present(dim * k, 0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto c = static_cast<std::size_t>(data.labels[i]);
    for (const auto& e : data.vectors[i]) present[e.index * k + c] += 1;
  }

  std::vector<double> gain(dim, 0.0);
  std::vector<std::size_t> with(k), without(k);
  for (std::size_t t = 0; t < dim; ++t) {
    std::size_t n_with = 0;
    for (std::size_t c = 0; c < k; ++c) {
      with[c] = present[t * k + c];
      without[c] = totals[c] - with[c];
      n_with += with[c];
    }
    if (n_with == 0 || n_with == data.size()) continue;
    const double pw = static_cast<double>(n_with) / n;
    const double conditional = pw * entropy_bits(with) + (1.0 - pw) * entropy_bits(without);
    double g = h - conditional;
    if (std::abs(g) < 1e-12) g = 0.0;
    gain[t] = std::clamp(g, 0.0, h);
  }
  return gain;
}

FeatureSpace info_gain_select(const LabeledDataset& data, double threshold) {
  if (!data.space) throw ValidationError("info gain: dataset has no feature space");
  const auto gain = info_gain(data);
  std::vector<TermIndex> keep;
  for (TermIndex t : data.space->selected()) {
    if (gain[t] > threshold) keep.push_back(t);
  }
  if (keep.empty()) throw ValidationError("no features selected");
  return data.space->with_selection(std::move(keep));
}

}  // namespace triage
