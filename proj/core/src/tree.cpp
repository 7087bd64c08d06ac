// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <numeric>

#include "triage/learners.hpp"

namespace triage {
namespace {

struct Candidate {
  double score = -1.0;  // sum over sides of sum_c count^2 / n_side; higher is better
  int feature = -1;
  double threshold = 0.0;
};

int majority(std::span<const std::size_t> counts) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return static_cast<int>(best);
}

double purity_score(std::span<const std::size_t> counts, std::size_t n) {
  if (n == 0) return 0.0;
  double s = 0.0;
  for (auto c : counts) s += static_cast<double>(c) * static_cast<double>(c);
  return s / static_cast<double>(n);
}

}  // namespace

DecisionTree DecisionTree::fit(const LabeledDataset& data, std::span<const std::size_t> samples,
                               const TreeOptions& options, Rng& rng) {
  const std::size_t k = data.label_set.size();
  const std::size_t dim = data.space->dimension();
  std::size_t mtry = options.features_per_split > 0
                         ? static_cast<std::size_t>(options.features_per_split)
                         : std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(
                                                        std::sqrt(static_cast<double>(dim)))));

  std::vector<TreeNode> nodes;
  struct Work {
    int node;
    std::vector<std::size_t> samples;
    int depth;
  };
  std::vector<Work> stack;
  nodes.push_back({});
  stack.push_back({0, std::vector<std::size_t>(samples.begin(), samples.end()), 0});

  // Scratch buffers reused across nodes.
  std::vector<int> slot(dim, -1);
  std::vector<TermIndex> present;
  std::vector<std::vector<std::pair<double, int>>> values;
  std::vector<std::size_t> counts(k), left(k), nz(k);

  while (!stack.empty()) {
    Work work = std::move(stack.back());
    stack.pop_back();
    const auto& idx = work.samples;

    std::fill(counts.begin(), counts.end(), 0);
    for (auto i : idx) ++counts[static_cast<std::size_t>(data.labels[i])];
    nodes[static_cast<std::size_t>(work.node)].label = majority(counts);

    const bool pure =
        std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;
    if (pure || idx.size() < static_cast<std::size_t>(std::max(2, options.min_samples_split)) ||
        (options.max_depth > 0 && work.depth >= options.max_depth)) {
      continue;
    }

    // Features non-zero somewhere in the node; the rest cannot split it.
    present.clear();
    for (auto i : idx) {
      for (const auto& e : data.vectors[i]) {
        if (slot[e.index] == -1) {
          slot[e.index] = -2;
          present.push_back(e.index);
        }
      }
    }
    std::sort(present.begin(), present.end());
    std::vector<TermIndex> chosen;
    if (present.size() <= mtry) {
      chosen = present;
    } else {
      for (std::size_t j = 0; j < mtry; ++j) {
        std::swap(present[j], present[j + rng.index(present.size() - j)]);
      }
      chosen.assign(present.begin(), present.begin() + static_cast<std::ptrdiff_t>(mtry));
      std::sort(chosen.begin(), chosen.end());
    }
    for (auto f : present) slot[f] = -1;
    values.resize(chosen.size());
    for (std::size_t s = 0; s < chosen.size(); ++s) {
      slot[chosen[s]] = static_cast<int>(s);
      values[s].clear();
    }
    for (auto i : idx) {
      for (const auto& e : data.vectors[i]) {
        if (slot[e.index] >= 0) values[static_cast<std::size_t>(slot[e.index])].push_back({e.weight, data.labels[i]});
      }
    }
    for (auto f : chosen) slot[f] = -1;

    const double parent = purity_score(counts, idx.size());
    Candidate best;
    best.score = parent + 1e-12;
    for (std::size_t s = 0; s < chosen.size(); ++s) {
      auto& vals = values[s];
      std::sort(vals.begin(), vals.end());
      // Left side starts with the implicit zeros (all weights are >= 0).
      std::fill(nz.begin(), nz.end(), 0);
      for (const auto& v : vals) ++nz[static_cast<std::size_t>(v.second)];
      std::size_t n_left = idx.size() - vals.size();
      for (std::size_t c = 0; c < k; ++c) left[c] = counts[c] - nz[c];
      double prev = 0.0;
      for (std::size_t j = 0; j <= vals.size(); ++j) {
        const bool boundary = j == vals.size() || vals[j].first > prev;
        if (boundary && n_left > 0 && n_left < idx.size() && j < vals.size()) {
          double right_score = 0.0;
          double left_score = 0.0;
          for (std::size_t c = 0; c < k; ++c) {
            const double l = static_cast<double>(left[c]);
            const double r = static_cast<double>(counts[c] - left[c]);
            left_score += l * l;
            right_score += r * r;
          }
          const double n_l = static_cast<double>(n_left);
          const double n_r = static_cast<double>(idx.size() - n_left);
          const double score = left_score / n_l + right_score / n_r;
          if (score > best.score) {
            best.score = score;
            best.feature = static_cast<int>(chosen[s]);
            best.threshold = 0.5 * (prev + vals[j].first);
          }
        }
        if (j < vals.size()) {
          prev = vals[j].first;
          ++left[static_cast<std::size_t>(vals[j].second)];
          ++n_left;
        }
      }
    }
    if (best.feature < 0) continue;

    std::vector<std::size_t> go_left, go_right;
    for (auto i : idx) {
      const double v = data.vectors[i].get(static_cast<TermIndex>(best.feature));
      (v <= best.threshold ? go_left : go_right).push_back(i);
    }
    const int l = static_cast<int>(nodes.size());
    nodes.push_back({});
    nodes.push_back({});
    auto& node = nodes[static_cast<std::size_t>(work.node)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = l;
    node.right = l + 1;
    stack.push_back({l + 1, std::move(go_right), work.depth + 1});
    stack.push_back({l, std::move(go_left), work.depth + 1});
  }
  return DecisionTree(std::move(nodes));
}

int DecisionTree::predict(const SparseVector& x) const {
  if (nodes_.empty()) return 0;
  std::size_t at = 0;
  while (nodes_[at].feature >= 0) {
    const double v = x.get(static_cast<TermIndex>(nodes_[at].feature));
    at = static_cast<std::size_t>(v <= nodes_[at].threshold ? nodes_[at].left : nodes_[at].right);
  }
  return nodes_[at].label;
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> d(nodes_.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes_[i].right)] = d[i] + 1;
    }
    deepest = std::max(deepest, d[i]);
  }
  return deepest;
}

}  // namespace triage
