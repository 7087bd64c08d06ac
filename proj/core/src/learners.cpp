// SPDX-License-Identifier: Apache-2.0
#include "triage/learners.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "triage/error.hpp"

namespace triage {

// --- kinds and specs --------------------------------------------------------------

std::string_view to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::zero_r: return "zero_r";
    case ClassifierKind::naive_bayes_multinomial: return "naive_bayes_multinomial";
    case ClassifierKind::knn: return "knn";
    case ClassifierKind::logistic_regression: return "logistic_regression";
    case ClassifierKind::sgd_text: return "sgd_text";
    case ClassifierKind::random_forest: return "random_forest";
  }
  return "zero_r";
}

const std::vector<ClassifierKind>& all_classifier_kinds() {
  static const std::vector<ClassifierKind> kinds{
      ClassifierKind::zero_r,  ClassifierKind::naive_bayes_multinomial,
      ClassifierKind::knn,     ClassifierKind::logistic_regression,
      ClassifierKind::sgd_text, ClassifierKind::random_forest};
  return kinds;
}

std::optional<ClassifierKind> parse_classifier_kind(std::string_view name) {
  for (auto k : all_classifier_kinds()) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

void ClassifierSpec::validate() const {
  std::vector<ValidationError::Field> bad;
  const auto& p = params;
  switch (kind) {
    case ClassifierKind::zero_r:
      break;
    case ClassifierKind::naive_bayes_multinomial:
      if (!(p.alpha > 0.0)) bad.push_back({"alpha", "must be > 0"});
      break;
    case ClassifierKind::knn:
      if (p.k < 1) bad.push_back({"k", "must be >= 1"});
      break;
    case ClassifierKind::logistic_regression:
    case ClassifierKind::sgd_text:
      if (!(p.l2 >= 0.0)) bad.push_back({"l2", "must be >= 0"});
      if (!(p.learning_rate > 0.0)) bad.push_back({"learning_rate", "must be > 0"});
      if (p.epochs < 1) bad.push_back({"epochs", "must be >= 1"});
      if (!(p.tolerance >= 0.0)) bad.push_back({"tolerance", "must be >= 0"});
      break;
    case ClassifierKind::random_forest:
      if (p.trees < 1) bad.push_back({"trees", "must be >= 1"});
      if (p.max_depth < 0) bad.push_back({"max_depth", "must be >= 0"});
      if (p.features_per_split < 0) bad.push_back({"features_per_split", "must be >= 0"});
      if (p.min_samples_split < 2) bad.push_back({"min_samples_split", "must be >= 2"});
      if (p.threads < 0) bad.push_back({"threads", "must be >= 0"});
      break;
  }
  if (!bad.empty()) {
    throw ValidationError("invalid " + std::string(to_string(kind)) + " hyperparameters",
                          std::move(bad));
  }
}

std::string ClassifierSpec::describe() const {
  std::ostringstream out;
  out << to_string(kind);
  const auto& p = params;
  switch (kind) {
    case ClassifierKind::zero_r: break;
    case ClassifierKind::naive_bayes_multinomial: out << "(alpha=" << p.alpha << ")"; break;
    case ClassifierKind::knn: out << "(k=" << p.k << ")"; break;
    case ClassifierKind::logistic_regression:
    case ClassifierKind::sgd_text:
      out << "(l2=" << p.l2 << ",lr=" << p.learning_rate << ",epochs=" << p.epochs << ")";
      break;
    case ClassifierKind::random_forest:
      out << "(trees=" << p.trees << ",max_depth=" << p.max_depth
          << ",mtry=" << p.features_per_split << ")";
      break;
  }
  return out.str();
}

std::size_t Distribution::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

namespace {

Distribution normalized(std::vector<double> scores) {
  double sum = 0.0;
  for (double& s : scores) {
    if (!(s > 0.0)) s = 0.0;
    sum += s;
  }
  if (!(sum > 0.0)) {
    std::fill(scores.begin(), scores.end(), 1.0 / static_cast<double>(scores.size()));
  } else {
    for (double& s : scores) s /= sum;
  }
  return {std::move(scores)};
}

// exp-normalize with the max subtracted.
Distribution softmax(std::vector<double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  for (double& z : logits) z = std::exp(z - m);
  return normalized(std::move(logits));
}

std::vector<double> class_prior(const LabeledDataset& data) {
  const auto counts = data.class_counts();
  std::vector<double> prior(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    prior[c] = static_cast<double>(counts[c]) / static_cast<double>(data.size());
  }
  return prior;
}

std::size_t distinct_labels(const LabeledDataset& data) {
  const auto counts = data.class_counts();
  return static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
}

// --- ZeroR ---

ZeroRParams train_zero_r(const LabeledDataset& data) {
  ZeroRParams p;
  const auto counts = data.class_counts();
  p.majority = static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
  p.prior = class_prior(data);
  return p;
}

// --- multinomial naive Bayes ---

NaiveBayesParams train_naive_bayes(const LabeledDataset& data, double alpha) {
  const std::size_t k = data.label_set.size();
  const std::size_t dim = data.space->dimension();
  const double vocab = static_cast<double>(data.space->selected().size());
  NaiveBayesParams p;
  p.prior = class_prior(data);
  p.log_prior.resize(k);
  // Laplace-smoothed prior so an absent class keeps a finite score.
  const auto counts = data.class_counts();
  for (std::size_t c = 0; c < k; ++c) {
    p.log_prior[c] = std::log((static_cast<double>(counts[c]) + 1.0) /
                              (static_cast<double>(data.size()) + static_cast<double>(k)));
  }
  std::vector<double> mass(k * dim, 0.0), total(k, 0.0);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto c = static_cast<std::size_t>(data.labels[i]);
    for (const auto& e : data.vectors[i]) {
      mass[c * dim + e.index] += e.weight;
      total[c] += e.weight;
    }
  }
  p.log_likelihood.resize(k * dim);
  for (std::size_t c = 0; c < k; ++c) {
    const double denom = std::log(total[c] + alpha * vocab);
    for (std::size_t t = 0; t < dim; ++t) {
      p.log_likelihood[c * dim + t] = std::log(mass[c * dim + t] + alpha) - denom;
    }
  }
  return p;
}

Distribution predict_naive_bayes(const NaiveBayesParams& p, const SparseVector& x) {
  const std::size_t k = p.log_prior.size();
  const std::size_t dim = k ? p.log_likelihood.size() / k : 0;
  std::vector<double> logits(p.log_prior);
  for (const auto& e : x) {
    if (e.index >= dim) continue;
    for (std::size_t c = 0; c < k; ++c) logits[c] += e.weight * p.log_likelihood[c * dim + e.index];
  }
  return softmax(std::move(logits));
}

}  // namespace

// --- kNN ---

class KnnIndex {
 public:
  KnnIndex(const std::vector<SparseVector>& vectors, std::size_t dim) : postings_(dim) {
    norms_.reserve(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      norms_.push_back(vectors[i].norm());
      for (const auto& e : vectors[i]) {
        if (e.index < dim) postings_[e.index].push_back({static_cast<std::uint32_t>(i), e.weight});
      }
    }
  }

  // Cosine similarity of x against every stored vector.
  std::vector<double> similarities(const SparseVector& x) const {
    std::vector<double> dots(norms_.size(), 0.0);
    for (const auto& e : x) {
      if (e.index >= postings_.size()) continue;
      for (const auto& [doc, w] : postings_[e.index]) dots[doc] += e.weight * w;
    }
    const double nx = x.norm();
    for (std::size_t i = 0; i < dots.size(); ++i) {
      dots[i] = (nx > 0.0 && norms_[i] > 0.0) ? dots[i] / (nx * norms_[i]) : 0.0;
    }
    return dots;
  }

 private:
  struct Posting {
    std::uint32_t doc;
    double weight;
  };
  std::vector<std::vector<Posting>> postings_;
  std::vector<double> norms_;
};

namespace {

void attach_knn_index(KnnParams& p, std::size_t dim) {
  p.index = std::make_shared<const KnnIndex>(p.vectors, dim);
}

Distribution predict_knn(const KnnParams& p, const SparseVector& x) {
  if (x.empty() || p.vectors.empty()) return normalized(p.prior);
  const auto sims = p.index->similarities(x);
  std::vector<std::uint32_t> order(sims.size());
  std::iota(order.begin(), order.end(), 0u);
  const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(p.k), order.size());
  // Ties in similarity go to the earlier training instance.
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::uint32_t a, std::uint32_t b) {
                      return sims[a] != sims[b] ? sims[a] > sims[b] : a < b;
                    });
  std::vector<double> votes(p.prior.size(), 0.0);
  for (std::size_t i = 0; i < k; ++i) votes[static_cast<std::size_t>(p.labels[order[i]])] += 1.0;
  return normalized(std::move(votes));
}

// --- linear models ---
//
// Plain SGD on the regularized objective with the step size
// eta_t = eta_0 / (1 + eta_0 * l2 * t). The weight vector is stored as
// scale * v so the shrink from the L2 term costs O(1) per step.

struct ScaledWeights {
  std::vector<double> v;
  double scale = 1.0;

  explicit ScaledWeights(std::size_t n) : v(n, 0.0) {}

  void shrink(double factor) {
    scale *= factor;
    if (scale < 1e-9) {
      for (double& x : v) x *= scale;
      scale = 1.0;
    }
  }
  std::vector<double> materialize() const {
    std::vector<double> w(v);
    for (double& x : w) x *= scale;
    return w;
  }
};

double grad_norm(const std::vector<double>& g) {
  double s = 0.0;
  for (double x : g) s += x * x;
  return std::sqrt(s);
}

SoftmaxParams train_softmax(const LabeledDataset& data, const ClassifierSpec& spec) {
  const auto& hp = spec.params;
  const std::size_t k = data.label_set.size();
  const std::size_t dim = data.space->dimension();
  ScaledWeights w(k * dim);
  std::vector<double> bias(k, 0.0);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(spec.seed);
  std::vector<double> z(k);
  std::vector<double> params;
  std::vector<double> grad;
  double t = 0.0;
  int epochs_run = 0;

  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      const double eta = hp.learning_rate / (1.0 + hp.learning_rate * hp.l2 * t);
      t += 1.0;
      const auto& x = data.vectors[i];
      for (std::size_t c = 0; c < k; ++c) {
        double s = 0.0;
        for (const auto& e : x) s += w.v[c * dim + e.index] * e.weight;
        z[c] = s * w.scale + bias[c];
      }
      const double m = *std::max_element(z.begin(), z.end());
      double sum = 0.0;
      for (double& v : z) {
        v = std::exp(v - m);
        sum += v;
      }
      w.shrink(1.0 - eta * hp.l2);
      const auto y = static_cast<std::size_t>(data.labels[i]);
      for (std::size_t c = 0; c < k; ++c) {
        const double g = z[c] / sum - (c == y ? 1.0 : 0.0);
        if (g == 0.0) continue;
        const double step = eta * g / w.scale;
        for (const auto& e : x) w.v[c * dim + e.index] -= step * e.weight;
        bias[c] -= eta * g;
      }
    }
    epochs_run = epoch + 1;
    if (hp.tolerance > 0.0) {
      const auto weights = w.materialize();
      params.assign(k * (dim + 1), 0.0);
      for (std::size_t c = 0; c < k; ++c) {
        std::copy(weights.begin() + static_cast<std::ptrdiff_t>(c * dim),
                  weights.begin() + static_cast<std::ptrdiff_t>((c + 1) * dim),
                  params.begin() + static_cast<std::ptrdiff_t>(c * (dim + 1)));
        params[c * (dim + 1) + dim] = bias[c];
      }
      softmax_objective(params, data, hp.l2, &grad);
      if (grad_norm(grad) < hp.tolerance) break;
    }
  }
  SoftmaxParams p;
  p.classes = k;
  p.dimension = dim;
  p.weights = w.materialize();
  p.bias = std::move(bias);
  p.epochs_run = epochs_run;
  return p;
}

Distribution predict_softmax(const SoftmaxParams& p, const SparseVector& x) {
  std::vector<double> z(p.bias);
  for (const auto& e : x) {
    if (e.index >= p.dimension) continue;
    for (std::size_t c = 0; c < p.classes; ++c) z[c] += p.weights[c * p.dimension + e.index] * e.weight;
  }
  return softmax(std::move(z));
}

HingeParams train_hinge(const LabeledDataset& data, const ClassifierSpec& spec) {
  const auto& hp = spec.params;
  const std::size_t dim = data.space->dimension();
  ScaledWeights w(dim);
  double bias = 0.0;
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(spec.seed);
  double t = 0.0;
  int epochs_run = 0;
  std::vector<double> params, grad;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t i : order) {
      const double eta = hp.learning_rate / (1.0 + hp.learning_rate * hp.l2 * t);
      t += 1.0;
      const auto& x = data.vectors[i];
      const double y = data.labels[i] == 1 ? 1.0 : -1.0;
      double s = 0.0;
      for (const auto& e : x) s += w.v[e.index] * e.weight;
      const double margin = y * (s * w.scale + bias);
      w.shrink(1.0 - eta * hp.l2);
      if (margin < 1.0) {
        const double step = eta * y / w.scale;
        for (const auto& e : x) w.v[e.index] += step * e.weight;
        bias += eta * y;
      }
    }
    epochs_run = epoch + 1;
    if (hp.tolerance > 0.0) {
      params = w.materialize();
      params.push_back(bias);
      hinge_objective(params, data, hp.l2, &grad);
      if (grad_norm(grad) < hp.tolerance) break;
    }
  }
  HingeParams p;
  p.weights = w.materialize();
  p.bias = bias;
  p.epochs_run = epochs_run;
  return p;
}

Distribution predict_hinge(const HingeParams& p, const SparseVector& x) {
  double m = p.bias;
  for (const auto& e : x) {
    if (e.index < p.weights.size()) m += p.weights[e.index] * e.weight;
  }
  // Logistic link on the margin; monotone, so argmax follows the sign.
  const double positive = 1.0 / (1.0 + std::exp(-m));
  return normalized({1.0 - positive, positive});
}

// --- random forest ---

ForestParams train_forest(const LabeledDataset& data, const ClassifierSpec& spec) {
  const auto& hp = spec.params;
  TreeOptions options;
  options.max_depth = hp.max_depth;
  options.features_per_split = hp.features_per_split;
  options.min_samples_split = hp.min_samples_split;

  ForestParams p;
  p.trees.resize(static_cast<std::size_t>(hp.trees));
  auto grow = [&](std::size_t t) {
    Rng rng(derive_seed(spec.seed, t));
    std::vector<std::size_t> sample(data.size());
    if (hp.bootstrap) {
      for (auto& s : sample) s = rng.index(data.size());
    } else {
      std::iota(sample.begin(), sample.end(), 0);
    }
    p.trees[t] = DecisionTree::fit(data, sample, options, rng);
  };

  unsigned threads = hp.threads > 0 ? static_cast<unsigned>(hp.threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(hp.trees));
  if (threads <= 1) {
    for (std::size_t t = 0; t < p.trees.size(); ++t) grow(t);
  } else {
    // Each tree owns a seed derived from (spec.seed, tree index), so the
    // schedule does not affect the result.
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t t = w; t < p.trees.size(); t += threads) grow(t);
      });
    }
    for (auto& th : pool) th.join();
  }
  return p;
}

Distribution predict_forest(const ForestParams& p, std::size_t classes, const SparseVector& x) {
  std::vector<double> votes(classes, 0.0);
  for (const auto& tree : p.trees) votes[static_cast<std::size_t>(tree.predict(x))] += 1.0;
  return normalized(std::move(votes));
}

}  // namespace

// --- TrainedModel -----------------------------------------------------------------

TrainedModel::TrainedModel(ClassifierSpec spec, std::vector<std::string> label_set,
                           std::shared_ptr<const FeatureSpace> space, ModelParameters parameters)
    : spec_(std::move(spec)),
      label_set_(std::move(label_set)),
      space_(std::move(space)),
      parameters_(std::move(parameters)) {
  if (label_set_.empty()) throw ValidationError("model: label set is empty");
  if (!space_) throw ValidationError("model: no feature space");
  static constexpr ClassifierKind kKindOf[] = {
      ClassifierKind::zero_r,  ClassifierKind::naive_bayes_multinomial,
      ClassifierKind::knn,     ClassifierKind::logistic_regression,
      ClassifierKind::sgd_text, ClassifierKind::random_forest};
  if (kKindOf[parameters_.index()] != spec_.kind) {
    throw ValidationError("model: parameters do not match classifier kind");
  }
  if (auto* knn = std::get_if<KnnParams>(&parameters_); knn && !knn->index) {
    attach_knn_index(*knn, space_->dimension());
  }
}

Distribution TrainedModel::predict(const SparseVector& x) const {
  const std::size_t k = label_set_.size();
  return std::visit(
      [&](const auto& p) -> Distribution {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ZeroRParams>) {
          std::vector<double> s(k, 0.0);
          s[static_cast<std::size_t>(p.majority)] = 1.0;
          return {std::move(s)};
        } else if constexpr (std::is_same_v<P, NaiveBayesParams>) {
          return predict_naive_bayes(p, x);
        } else if constexpr (std::is_same_v<P, KnnParams>) {
          return predict_knn(p, x);
        } else if constexpr (std::is_same_v<P, SoftmaxParams>) {
          return predict_softmax(p, x);
        } else if constexpr (std::is_same_v<P, HingeParams>) {
          return predict_hinge(p, x);
        } else {
          return predict_forest(p, k, x);
        }
      },
      parameters_);
}

const std::string& TrainedModel::classify(const SparseVector& x) const {
  return label_set_[predict(x).argmax()];
}

TrainedModel train(const ClassifierSpec& spec, const LabeledDataset& data) {
  spec.validate();
  if (data.empty()) throw ValidationError("cannot train on an empty dataset");
  if (!data.space) throw ValidationError("dataset has no feature space");
  data.validate();
  if (data.label_set.empty()) throw ValidationError("dataset has an empty label set");
  if (spec.kind == ClassifierKind::sgd_text && data.label_set.size() != 2) {
    throw ValidationError("binary-only classifier: sgd_text needs exactly 2 labels, got " +
                          std::to_string(data.label_set.size()));
  }
  if (spec.kind == ClassifierKind::sgd_text && distinct_labels(data) < 2) {
    throw ValidationError("sgd_text needs instances of both labels");
  }

  ModelParameters params = [&]() -> ModelParameters {
    switch (spec.kind) {
      case ClassifierKind::zero_r: return train_zero_r(data);
      case ClassifierKind::naive_bayes_multinomial:
        return train_naive_bayes(data, spec.params.alpha);
      case ClassifierKind::knn: {
        KnnParams p;
        p.k = spec.params.k;
        p.vectors = data.vectors;
        p.labels = data.labels;
        p.prior = class_prior(data);
        return p;
      }
      case ClassifierKind::logistic_regression: return train_softmax(data, spec);
      case ClassifierKind::sgd_text: return train_hinge(data, spec);
      case ClassifierKind::random_forest: return train_forest(data, spec);
    }
    throw ValidationError("unknown classifier kind");
  }();
  TrainedModel model(spec, data.label_set, data.space, std::move(params));
  model.trained_at = now_seconds();
  return model;
}

// --- objectives ----------------------------------------------------------------------

double softmax_objective(std::span<const double> params, const LabeledDataset& data, double l2,
                         std::vector<double>* grad) {
  const std::size_t k = data.label_set.size();
  const std::size_t dim = data.space->dimension();
  const std::size_t stride = dim + 1;
  if (params.size() != k * stride) throw ValidationError("softmax objective: bad parameter size");
  if (grad) grad->assign(params.size(), 0.0);
  const double n = static_cast<double>(data.size());
  double loss = 0.0;
  std::vector<double> z(k);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& x = data.vectors[i];
    for (std::size_t c = 0; c < k; ++c) {
      double s = params[c * stride + dim];
      for (const auto& e : x) s += params[c * stride + e.index] * e.weight;
      z[c] = s;
    }
    const double m = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - m);
    const double log_sum = m + std::log(sum);
    const auto y = static_cast<std::size_t>(data.labels[i]);
    loss += log_sum - z[y];
    if (grad) {
      for (std::size_t c = 0; c < k; ++c) {
        const double g = (std::exp(z[c] - log_sum) - (c == y ? 1.0 : 0.0)) / n;
        for (const auto& e : x) (*grad)[c * stride + e.index] += g * e.weight;
        (*grad)[c * stride + dim] += g;
      }
    }
  }
  loss /= n;
  double reg = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t t = 0; t < dim; ++t) {
      const double w = params[c * stride + t];
      reg += w * w;
      if (grad) (*grad)[c * stride + t] += l2 * w;
    }
  }
  return loss + 0.5 * l2 * reg;
}

double hinge_objective(std::span<const double> params, const LabeledDataset& data, double l2,
                       std::vector<double>* grad) {
  const std::size_t dim = data.space->dimension();
  if (params.size() != dim + 1) throw ValidationError("hinge objective: bad parameter size");
  if (grad) grad->assign(params.size(), 0.0);
  const double n = static_cast<double>(data.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& x = data.vectors[i];
    const double y = data.labels[i] == 1 ? 1.0 : -1.0;
    double s = params[dim];
    for (const auto& e : x) s += params[e.index] * e.weight;
    const double slack = 1.0 - y * s;
    if (slack > 0.0) {
      loss += slack;
      if (grad) {
        for (const auto& e : x) (*grad)[e.index] -= y * e.weight / n;
        (*grad)[dim] -= y / n;
      }
    }
  }
  loss /= n;
  double reg = 0.0;
  for (std::size_t t = 0; t < dim; ++t) {
    reg += params[t] * params[t];
    if (grad) (*grad)[t] += l2 * params[t];
  }
  return loss + 0.5 * l2 * reg;
}

}  // namespace triage
