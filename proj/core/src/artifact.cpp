// SPDX-License-Identifier: Apache-2.0
#include <cstring>

#include "json.hpp"

#include "triage/error.hpp"
#include "triage/learners.hpp"

namespace triage {
namespace {

using nlohmann::json;

constexpr std::string_view kMagic = "TRGMODEL";
constexpr std::size_t kHeaderSize = 8 + 4 + 8;

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(std::string_view in, std::size_t offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
  }
  return value;
}

json sparse_to_json(const SparseVector& v) {
  json idx = json::array(), w = json::array();
  for (const auto& e : v) {
    idx.push_back(e.index);
    w.push_back(e.weight);
  }
  return {{"i", std::move(idx)}, {"w", std::move(w)}};
}

SparseVector sparse_from_json(const json& j) {
  const auto idx = j.at("i").get<std::vector<TermIndex>>();
  const auto w = j.at("w").get<std::vector<double>>();
  if (idx.size() != w.size()) throw ValidationError("artifact: sparse vector length mismatch");
  std::vector<SparseVector::Entry> entries;
  entries.reserve(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) entries.push_back({idx[i], w[i]});
  return SparseVector::from_unsorted(std::move(entries));
}

json hyper_to_json(const Hyperparameters& p) {
  return {{"k", p.k},
          {"alpha", p.alpha},
          {"l2", p.l2},
          {"learning_rate", p.learning_rate},
          {"epochs", p.epochs},
          {"tolerance", p.tolerance},
          {"trees", p.trees},
          {"max_depth", p.max_depth},
          {"features_per_split", p.features_per_split},
          {"min_samples_split", p.min_samples_split},
          {"bootstrap", p.bootstrap},
          {"threads", p.threads}};
}

Hyperparameters hyper_from_json(const json& j) {
  Hyperparameters p;
  p.k = j.at("k").get<int>();
  p.alpha = j.at("alpha").get<double>();
  p.l2 = j.at("l2").get<double>();
  p.learning_rate = j.at("learning_rate").get<double>();
  p.epochs = j.at("epochs").get<int>();
  p.tolerance = j.at("tolerance").get<double>();
  p.trees = j.at("trees").get<int>();
  p.max_depth = j.at("max_depth").get<int>();
  p.features_per_split = j.at("features_per_split").get<int>();
  p.min_samples_split = j.at("min_samples_split").get<int>();
  p.bootstrap = j.at("bootstrap").get<bool>();
  p.threads = j.at("threads").get<int>();
  return p;
}

json params_to_json(const ModelParameters& params) {
  return std::visit(
      [](const auto& p) -> json {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ZeroRParams>) {
          return {{"majority", p.majority}, {"prior", p.prior}};
        } else if constexpr (std::is_same_v<P, NaiveBayesParams>) {
          return {{"log_prior", p.log_prior},
                  {"log_likelihood", p.log_likelihood},
                  {"prior", p.prior}};
        } else if constexpr (std::is_same_v<P, KnnParams>) {
          json vectors = json::array();
          for (const auto& v : p.vectors) vectors.push_back(sparse_to_json(v));
          return {{"k", p.k}, {"vectors", std::move(vectors)}, {"labels", p.labels},
                  {"prior", p.prior}};
        } else if constexpr (std::is_same_v<P, SoftmaxParams>) {
          return {{"classes", p.classes},  {"dimension", p.dimension}, {"weights", p.weights},
                  {"bias", p.bias},        {"epochs_run", p.epochs_run}};
        } else if constexpr (std::is_same_v<P, HingeParams>) {
          return {{"weights", p.weights}, {"bias", p.bias}, {"epochs_run", p.epochs_run}};
        } else {
          json trees = json::array();
          for (const auto& tree : p.trees) {
            json feature = json::array(), threshold = json::array(), left = json::array(),
                 right = json::array(), label = json::array();
            for (const auto& n : tree.nodes()) {
              feature.push_back(n.feature);
              threshold.push_back(n.threshold);
              left.push_back(n.left);
              right.push_back(n.right);
              label.push_back(n.label);
            }
            trees.push_back({{"feature", std::move(feature)},
                             {"threshold", std::move(threshold)},
                             {"left", std::move(left)},
                             {"right", std::move(right)},
                             {"label", std::move(label)}});
          }
          return {{"trees", std::move(trees)}};
        }
      },
      params);
}

ModelParameters params_from_json(ClassifierKind kind, const json& j, std::size_t classes,
                                 std::size_t dim) {
  auto check = [](bool ok, const char* what) {
    if (!ok) throw ValidationError(std::string("artifact: inconsistent ") + what);
  };
  switch (kind) {
    case ClassifierKind::zero_r: {
      ZeroRParams p;
      p.majority = j.at("majority").get<int>();
      p.prior = j.at("prior").get<std::vector<double>>();
      check(p.majority >= 0 && static_cast<std::size_t>(p.majority) < classes, "majority label");
      return p;
    }
    case ClassifierKind::naive_bayes_multinomial: {
      NaiveBayesParams p;
      p.log_prior = j.at("log_prior").get<std::vector<double>>();
      p.log_likelihood = j.at("log_likelihood").get<std::vector<double>>();
      p.prior = j.at("prior").get<std::vector<double>>();
      check(p.log_prior.size() == classes && p.log_likelihood.size() == classes * dim,
            "naive bayes tables");
      return p;
    }
    case ClassifierKind::knn: {
      KnnParams p;
      p.k = j.at("k").get<int>();
      for (const auto& v : j.at("vectors")) p.vectors.push_back(sparse_from_json(v));
      p.labels = j.at("labels").get<std::vector<int>>();
      p.prior = j.at("prior").get<std::vector<double>>();
      check(p.vectors.size() == p.labels.size() && p.prior.size() == classes, "knn memory");
      for (int y : p.labels) check(y >= 0 && static_cast<std::size_t>(y) < classes, "knn labels");
      for (const auto& v : p.vectors) {
        for (const auto& e : v) check(e.index < dim, "knn vector index");
      }
      return p;
    }
    case ClassifierKind::logistic_regression: {
      SoftmaxParams p;
      p.classes = j.at("classes").get<std::size_t>();
      p.dimension = j.at("dimension").get<std::size_t>();
      p.weights = j.at("weights").get<std::vector<double>>();
      p.bias = j.at("bias").get<std::vector<double>>();
      p.epochs_run = j.at("epochs_run").get<int>();
      check(p.classes == classes && p.dimension == dim &&
                p.weights.size() == classes * dim && p.bias.size() == classes,
            "softmax weights");
      return p;
    }
    case ClassifierKind::sgd_text: {
      HingeParams p;
      p.weights = j.at("weights").get<std::vector<double>>();
      p.bias = j.at("bias").get<double>();
      p.epochs_run = j.at("epochs_run").get<int>();
      check(p.weights.size() == dim && classes == 2, "hinge weights");
      return p;
    }
    case ClassifierKind::random_forest: {
      ForestParams p;
      for (const auto& t : j.at("trees")) {
        const auto feature = t.at("feature").get<std::vector<int>>();
        const auto threshold = t.at("threshold").get<std::vector<double>>();
        const auto left = t.at("left").get<std::vector<int>>();
        const auto right = t.at("right").get<std::vector<int>>();
        const auto label = t.at("label").get<std::vector<int>>();
        const std::size_t n = feature.size();
        check(n > 0 && threshold.size() == n && left.size() == n && right.size() == n &&
                  label.size() == n,
              "tree arrays");
        std::vector<TreeNode> nodes(n);
        for (std::size_t i = 0; i < n; ++i) {
          nodes[i] = {feature[i], threshold[i], left[i], right[i], label[i]};
          check(label[i] >= 0 && static_cast<std::size_t>(label[i]) < classes, "tree label");
          if (feature[i] >= 0) {
            // Children always follow their parent, which also rules out cycles.
            check(static_cast<std::size_t>(feature[i]) < dim && left[i] > static_cast<int>(i) &&
                      right[i] > static_cast<int>(i) && static_cast<std::size_t>(left[i]) < n &&
                      static_cast<std::size_t>(right[i]) < n,
                  "tree links");
          }
        }
        p.trees.emplace_back(std::move(nodes));
      }
      return p;
    }
  }
  throw ValidationError("artifact: unknown classifier kind");
}

}  // namespace

std::string save_model(const TrainedModel& model) {
  const auto& space = model.space();
  json doc;
  doc["spec"] = {{"kind", to_string(model.spec().kind)},
                 {"params", hyper_to_json(model.spec().params)},
                 {"seed", model.spec().seed}};
  doc["label_set"] = model.label_set();
  doc["space"] = {{"terms", space.terms()},
                  {"doc_freq", space.doc_freq()},
                  {"n_docs", space.n_docs()},
                  {"selected", space.selected()}};
  doc["parameters"] = params_to_json(model.parameters());
  json meta;
  meta["trained_at"] = model.trained_at.time_since_epoch().count();
  if (model.training_window) {
    meta["training_window"] = {model.training_window->first.time_since_epoch().count(),
                               model.training_window->second.time_since_epoch().count()};
  }
  if (model.metrics_ref) meta["metrics_ref"] = *model.metrics_ref;
  meta["stopword_fingerprint"] = model.stopword_fingerprint;
  doc["meta"] = std::move(meta);

  const std::vector<std::uint8_t> payload = json::to_cbor(doc);
  std::string out;
  out.reserve(kHeaderSize + payload.size());
  out.append(kMagic);
  put_le<std::uint32_t>(out, kModelSchemaVersion);
  put_le<std::uint64_t>(out, payload.size());
  out.append(reinterpret_cast<const char*>(payload.data()), payload.size());
  return out;
}

TrainedModel load_model(std::string_view bytes) {
  if (bytes.size() < kHeaderSize || bytes.substr(0, kMagic.size()) != kMagic) {
    throw ValidationError("artifact: not a model file (bad magic)");
  }
  const auto version = get_le<std::uint32_t>(bytes, 8);
  if (version == 0 || version > kModelSchemaVersion) {
    throw ValidationError("artifact: unsupported schema version " + std::to_string(version));
  }
  const auto length = get_le<std::uint64_t>(bytes, 12);
  if (length != bytes.size() - kHeaderSize) {
    throw ValidationError("artifact: payload length does not match header");
  }
  try {
    const auto* data = reinterpret_cast<const std::uint8_t*>(bytes.data() + kHeaderSize);
    const json doc = json::from_cbor(data, data + length);

    const auto& s = doc.at("spec");
    ClassifierSpec spec;
    const auto kind = parse_classifier_kind(s.at("kind").get<std::string>());
    if (!kind) throw ValidationError("artifact: unknown classifier kind");
    spec.kind = *kind;
    spec.params = hyper_from_json(s.at("params"));
    spec.seed = s.at("seed").get<std::uint64_t>();

    auto label_set = doc.at("label_set").get<std::vector<std::string>>();
    const auto& sp = doc.at("space");
    auto space = std::make_shared<const FeatureSpace>(
        sp.at("terms").get<std::vector<std::string>>(),
        sp.at("doc_freq").get<std::vector<std::uint32_t>>(), sp.at("n_docs").get<std::size_t>(),
        sp.at("selected").get<std::vector<TermIndex>>());
    auto params =
        params_from_json(spec.kind, doc.at("parameters"), label_set.size(), space->dimension());

    TrainedModel model(spec, std::move(label_set), std::move(space), std::move(params));
    const auto& meta = doc.at("meta");
    model.trained_at = Timestamp(std::chrono::seconds(meta.at("trained_at").get<std::int64_t>()));
    if (meta.contains("training_window")) {
      const auto& w = meta.at("training_window");
      model.training_window = std::pair{
          Timestamp(std::chrono::seconds(w.at(0).get<std::int64_t>())),
          Timestamp(std::chrono::seconds(w.at(1).get<std::int64_t>()))};
    }
    if (meta.contains("metrics_ref")) model.metrics_ref = meta.at("metrics_ref").get<std::string>();
    model.stopword_fingerprint = meta.at("stopword_fingerprint").get<std::uint64_t>();
    return model;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("artifact: corrupt payload: ") + e.what());
  }
}

}  // namespace triage
