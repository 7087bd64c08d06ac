// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "triage/random.hpp"
#include "triage/timeutil.hpp"
#include "triage/vectorize.hpp"

namespace triage {

enum class ClassifierKind {
  zero_r,
  naive_bayes_multinomial,
  knn,
  logistic_regression,
  sgd_text,
  random_forest,
};

std::string_view to_string(ClassifierKind kind);
std::optional<ClassifierKind> parse_classifier_kind(std::string_view name);
const std::vector<ClassifierKind>& all_classifier_kinds();

// Not every field applies to every kind; irrelevant ones are ignored.
struct Hyperparameters {
  int k = 1;                   // knn
  double alpha = 1.0;          // naive bayes Laplace smoothing
  double l2 = 1e-4;            // logistic / sgd ridge
  double learning_rate = 0.05; // logistic / sgd initial step
  int epochs = 60;             // logistic / sgd
  double tolerance = 1e-6;     // logistic: stop when the full gradient norm drops below
  int trees = 100;             // forest
  int max_depth = 0;           // forest, 0 = unlimited
  int features_per_split = 0;  // forest, 0 = floor(sqrt(n_features))
  int min_samples_split = 2;   // forest
  bool bootstrap = true;       // forest
  int threads = 0;             // forest, 0 = hardware concurrency

  bool operator==(const Hyperparameters&) const = default;
};

struct ClassifierSpec {
  ClassifierKind kind = ClassifierKind::zero_r;
  Hyperparameters params;
  std::uint64_t seed = 1;

  // Throws ValidationError for out-of-range hyperparameters.
  void validate() const;
  std::string describe() const;

  bool operator==(const ClassifierSpec&) const = default;
};

// Per-label scores, non-negative, summing to 1.
struct Distribution {
  std::vector<double> scores;

  // First maximal score in label order.
  std::size_t argmax() const;
  double max() const { return scores.empty() ? 0.0 : scores[argmax()]; }
};

// --- fitted parameters ------------------------------------------------------

struct ZeroRParams {
  int majority = 0;
  std::vector<double> prior;
};

struct NaiveBayesParams {
  std::vector<double> log_prior;       // per class
  std::vector<double> log_likelihood;  // class-major, classes x dimension
  std::vector<double> prior;
};

class KnnIndex;

struct KnnParams {
  int k = 1;
  std::vector<SparseVector> vectors;
  std::vector<int> labels;
  std::vector<double> prior;
  std::shared_ptr<const KnnIndex> index;  // rebuilt from vectors, not serialized
};

// Multinomial softmax. Row c of `weights` holds class c; bias separate.
struct SoftmaxParams {
  std::size_t classes = 0;
  std::size_t dimension = 0;
  std::vector<double> weights;  // classes x dimension
  std::vector<double> bias;     // classes
  int epochs_run = 0;
};

// Binary linear model; a positive margin means label_set[1].
struct HingeParams {
  std::vector<double> weights;
  double bias = 0.0;
  int epochs_run = 0;
};

struct TreeNode {
  int feature = -1;  // -1 for a leaf
  double threshold = 0.0;  // go left when value <= threshold
  int left = -1;
  int right = -1;
  int label = 0;  // majority label at the node

  bool operator==(const TreeNode&) const = default;
};

struct TreeOptions {
  int max_depth = 0;
  int features_per_split = 0;  // 0 = floor(sqrt(dimension)); >= dimension means all
  int min_samples_split = 2;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  // Gini CART on binary threshold splits. Candidate features are drawn from the
  // features that are non-zero in at least one sample at the node.
  static DecisionTree fit(const LabeledDataset& data, std::span<const std::size_t> samples,
                          const TreeOptions& options, Rng& rng);

  int predict(const SparseVector& x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  int depth() const;

  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct ForestParams {
  std::vector<DecisionTree> trees;
};

using ModelParameters = std::variant<ZeroRParams, NaiveBayesParams, KnnParams, SoftmaxParams,
                                     HingeParams, ForestParams>;

class TrainedModel {
 public:
  TrainedModel(ClassifierSpec spec, std::vector<std::string> label_set,
               std::shared_ptr<const FeatureSpace> space, ModelParameters parameters);

  const ClassifierSpec& spec() const { return spec_; }
  const std::vector<std::string>& label_set() const { return label_set_; }
  const FeatureSpace& space() const { return *space_; }
  const std::shared_ptr<const FeatureSpace>& space_ptr() const { return space_; }
  const ModelParameters& parameters() const { return parameters_; }

  Distribution predict(const SparseVector& x) const;
  const std::string& classify(const SparseVector& x) const;

  // Metadata.
  Timestamp trained_at{};
  std::optional<std::pair<Timestamp, Timestamp>> training_window;
  std::optional<std::string> metrics_ref;
  // Fingerprint of the stopword list used to build the space (0 = unknown).
  std::uint64_t stopword_fingerprint = 0;

 private:
  ClassifierSpec spec_;
  std::vector<std::string> label_set_;
  std::shared_ptr<const FeatureSpace> space_;
  ModelParameters parameters_;
};

// Deterministic in (spec, data). Throws ValidationError on empty data, a
// single-class dataset for learners that need two, or sgd_text with more than
// two labels ("binary-only classifier").
TrainedModel train(const ClassifierSpec& spec, const LabeledDataset& data);

inline Distribution predict(const TrainedModel& model, const SparseVector& x) {
  return model.predict(x);
}

// --- model artifact ---------------------------------------------------------
//
// Layout: 8-byte magic "TRGMODEL", little-endian uint32 schema version,
// little-endian uint64 payload length, then a CBOR document with the spec,
// label set, feature space, parameters and metadata. Doubles are stored as
// IEEE-754 binary64, so a load reproduces the saved model bit for bit.

inline constexpr std::uint32_t kModelSchemaVersion = 1;

std::string save_model(const TrainedModel& model);
// Throws ValidationError on a bad magic, a newer schema version or a corrupt payload.
TrainedModel load_model(std::string_view bytes);

// --- objectives (exposed for gradient checking) -------------------------------
//
// Mean loss over the dataset plus (l2 / 2) * ||w||^2 over the non-bias weights.
// Parameter layout for softmax: class c occupies [c*(D+1), c*(D+1)+D) for weights
// followed by its bias. For hinge: D weights then the bias. `grad`, when non-null,
// receives the gradient in the same layout.

double softmax_objective(std::span<const double> params, const LabeledDataset& data, double l2,
                         std::vector<double>* grad);
double hinge_objective(std::span<const double> params, const LabeledDataset& data, double l2,
                       std::vector<double>* grad);

}  // namespace triage
