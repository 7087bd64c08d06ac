// SPDX-License-Identifier: Apache-2.0
#include "triage/resample.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "triage/error.hpp"
#include "triage/random.hpp"

namespace triage {

std::string_view to_string(ResampleMethod m) {
  switch (m) {
    case ResampleMethod::none: return "none";
    case ResampleMethod::undersample: return "undersample";
    case ResampleMethod::oversample: return "oversample";
    case ResampleMethod::smote: return "smote";
  }
  return "none";
}

std::optional<ResampleMethod> parse_resample_method(std::string_view name) {
  for (auto m : {ResampleMethod::none, ResampleMethod::undersample, ResampleMethod::oversample,
                 ResampleMethod::smote}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

void ResampleSpec::validate() const {
  std::vector<ValidationError::Field> bad;
  if (size_factor && !(*size_factor > 0.0 && std::isfinite(*size_factor))) {
    bad.push_back({"size_factor", "must be a positive number"});
  }
  if (k_neighbors < 1) bad.push_back({"k_neighbors", "must be >= 1"});
  if (!bad.empty()) throw ValidationError("invalid resample settings", std::move(bad));
}

namespace {

std::vector<std::vector<std::size_t>> members_by_class(const LabeledDataset& data) {
  std::vector<std::vector<std::size_t>> members(data.label_set.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    members[static_cast<std::size_t>(data.labels[i])].push_back(i);
  }
  return members;
}

LabeledDataset pick(const LabeledDataset& data, std::span<const std::size_t> rows) {
  LabeledDataset out;
  out.space = data.space;
  out.label_set = data.label_set;
  out.vectors.reserve(rows.size());
  out.labels.reserve(rows.size());
  for (auto i : rows) {
    out.vectors.push_back(data.vectors[i]);
    out.labels.push_back(data.labels[i]);
  }
  return out;
}

void require_input(const LabeledDataset& data) {
  if (data.empty()) throw ValidationError("cannot resample an empty dataset");
  data.validate();
}

}  // namespace

LabeledDataset undersample(const LabeledDataset& data, std::uint64_t seed) {
  require_input(data);
  auto members = members_by_class(data);
  std::erase_if(members, [](const auto& m) { return m.empty(); });
  if (members.size() < 2) throw ValidationError("undersampling needs at least two classes");
  std::size_t minority = members.front().size();
  for (const auto& m : members) minority = std::min(minority, m.size());

  Rng rng(seed);
  std::vector<std::size_t> rows;
  rows.reserve(minority * members.size());
  for (auto& m : members) {
    rng.shuffle(std::span<std::size_t>(m));
    rows.insert(rows.end(), m.begin(), m.begin() + static_cast<std::ptrdiff_t>(minority));
  }
  rng.shuffle(std::span<std::size_t>(rows));
  return pick(data, rows);
}

LabeledDataset oversample(const LabeledDataset& data, double size_factor, std::uint64_t seed) {
  require_input(data);
  if (!(size_factor > 0.0)) throw ValidationError("size factor must be > 0");
  auto members = members_by_class(data);
  std::erase_if(members, [](const auto& m) { return m.empty(); });
  const auto total =
      static_cast<std::size_t>(std::floor(size_factor * static_cast<double>(data.size())));
  const std::size_t per_class = total / members.size();
  const std::size_t remainder = total % members.size();

  Rng rng(seed);
  std::vector<std::size_t> rows;
  rows.reserve(total);
  for (std::size_t c = 0; c < members.size(); ++c) {
    const std::size_t draws = per_class + (c < remainder ? 1 : 0);
    for (std::size_t d = 0; d < draws; ++d) rows.push_back(members[c][rng.index(members[c].size())]);
  }
  rng.shuffle(std::span<std::size_t>(rows));
  return pick(data, rows);
}

double default_oversample_factor(const LabeledDataset& data) {
  require_input(data);
  const auto counts = data.class_counts();
  const double share = static_cast<double>(*std::max_element(counts.begin(), counts.end())) /
                       static_cast<double>(data.size());
  const double percent = std::round(share * 100.0 * 100.0) / 100.0;
  return 2.0 * percent / 100.0;
}

SparseVector interpolate(const SparseVector& x, const SparseVector& z, double delta) {
  std::vector<SparseVector::Entry> out;
  out.reserve(x.nnz() + z.nnz());
  auto a = x.begin();
  auto b = z.begin();
  while (a != x.end() || b != z.end()) {
    if (b == z.end() || (a != x.end() && a->index < b->index)) {
      out.push_back({a->index, a->weight - delta * a->weight});
      ++a;
    } else if (a == x.end() || b->index < a->index) {
      out.push_back({b->index, delta * b->weight});
      ++b;
    } else {
      out.push_back({a->index, a->weight + delta * (b->weight - a->weight)});
      ++a;
      ++b;
    }
  }
  return SparseVector::from_unsorted(std::move(out));
}

LabeledDataset smote(const LabeledDataset& data, int k_neighbors, std::uint64_t seed) {
  require_input(data);
  if (k_neighbors < 1) throw ValidationError("k_neighbors must be >= 1");
  const auto members = members_by_class(data);
  std::size_t majority = 0;
  for (const auto& m : members) majority = std::max(majority, m.size());

  LabeledDataset out = data;
  Rng rng(seed);
  for (std::size_t c = 0; c < members.size(); ++c) {
    const auto& m = members[c];
    if (m.empty() || m.size() >= majority) continue;
    if (m.size() < 2) {
      throw ValidationError("insufficient instances for interpolation in class '" +
                            data.label_set[c] + "'");
    }
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(k_neighbors), m.size() - 1);
    std::vector<std::vector<std::size_t>> neighbours(m.size());
    std::vector<double> sims(m.size());
    std::vector<std::size_t> order(m.size());
    const std::size_t need = majority - m.size();
    for (std::size_t s = 0; s < need; ++s) {
      const std::size_t src = s % m.size();
      auto& nb = neighbours[src];
      if (nb.empty()) {
        for (std::size_t j = 0; j < m.size(); ++j) {
          sims[j] = cosine_similarity(data.vectors[m[src]], data.vectors[m[j]]);
        }
        std::iota(order.begin(), order.end(), 0);
        std::erase(order, src);
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                          [&](std::size_t a, std::size_t b) {
                            return sims[a] != sims[b] ? sims[a] > sims[b] : a < b;
                          });
        nb.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
        order.resize(m.size());
      }
      const std::size_t z = m[nb[rng.index(nb.size())]];
      const double delta = rng.uniform_closed();
      out.vectors.push_back(interpolate(data.vectors[m[src]], data.vectors[z], delta));
      out.labels.push_back(static_cast<int>(c));
    }
  }
  return out;
}

LabeledDataset resample(const LabeledDataset& data, const ResampleSpec& spec) {
  spec.validate();
  switch (spec.method) {
    case ResampleMethod::none: return data;
    case ResampleMethod::undersample: return undersample(data, spec.seed);
    case ResampleMethod::oversample:
      return oversample(data, spec.size_factor.value_or(default_oversample_factor(data)), spec.seed);
    case ResampleMethod::smote: return smote(data, spec.k_neighbors, spec.seed);
  }
  return data;
}

}  // namespace triage
