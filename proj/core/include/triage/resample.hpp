// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "triage/vectorize.hpp"

namespace triage {

enum class ResampleMethod { none, undersample, oversample, smote };

std::string_view to_string(ResampleMethod m);
std::optional<ResampleMethod> parse_resample_method(std::string_view name);

struct ResampleSpec {
  ResampleMethod method = ResampleMethod::none;
  // Output size as a multiple of the input size. Unset: 2 x majority-class share.
  std::optional<double> size_factor;
  int k_neighbors = 5;
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const ResampleSpec&) const = default;
};

// Every class cut to the minority count by sampling without replacement; the
// output is shuffled. Throws ValidationError with fewer than two classes present.
LabeledDataset undersample(const LabeledDataset& data, std::uint64_t seed);

// Draws floor(size_factor * n) instances with replacement, the same number from
// each class (remainder to the first classes in label order).
LabeledDataset oversample(const LabeledDataset& data, double size_factor, std::uint64_t seed);

// Twice the majority class share, taken as a percentage rounded to two
// decimals (29.75% -> 0.595), which is how the workbench filter receives it.
double default_oversample_factor(const LabeledDataset& data);

// Synthetic minority points x + delta * (z - x), delta ~ U[0,1], z among the
// k nearest same-class neighbours by cosine similarity, until every class
// reaches the majority count. Originals come first, in input order.
// Throws ValidationError("insufficient instances for interpolation") for a
// class that needs synthesis but has a single instance.
LabeledDataset smote(const LabeledDataset& data, int k_neighbors, std::uint64_t seed);

// x + delta * (z - x) over the union of non-zero coordinates.
SparseVector interpolate(const SparseVector& x, const SparseVector& z, double delta);

// Dispatches on spec.method. `none` returns the input unchanged.
LabeledDataset resample(const LabeledDataset& data, const ResampleSpec& spec);

}  // namespace triage
