// SPDX-License-Identifier: Apache-2.0
// JSON forms of the library types used by the experiment config, the training
// request, stored reports and HTTP responses.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "triage/assign.hpp"
#include "triage/corpus.hpp"
#include "triage/error.hpp"
#include "triage/evaluate.hpp"
#include "triage/learners.hpp"
#include "triage/resample.hpp"

namespace triage::schema {

using nlohmann::json;

// Collects field-level problems while reading a document, then throws them
// together as one ValidationError.
class Reader {
 public:
  explicit Reader(std::string prefix = {}) : prefix_(std::move(prefix)) {}

  void fail(const std::string& field, const std::string& message);
  std::string path(const std::string& field) const;
  Reader nested(const std::string& field) const;
  void merge(const Reader& other);
  bool ok() const { return errors_.empty(); }
  const std::vector<ValidationError::Field>& errors() const { return errors_; }
  // Throws ValidationError(what, errors) when any problem was recorded.
  void finish(const std::string& what) const;

  // Optional typed members; a present member of the wrong type is recorded.
  std::optional<double> number(const json& obj, const std::string& field);
  std::optional<long long> integer(const json& obj, const std::string& field);
  std::optional<bool> boolean(const json& obj, const std::string& field);
  std::optional<std::string> string(const json& obj, const std::string& field);
  std::optional<std::vector<std::string>> strings(const json& obj, const std::string& field);
  // Rejects members outside `allowed`.
  void known_fields(const json& obj, std::initializer_list<std::string_view> allowed);

 private:
  std::string prefix_;
  std::vector<ValidationError::Field> errors_;
};

// --- specs -----------------------------------------------------------------------------

json to_json(const ClassifierSpec& spec);
// {"kind": "...", "seed": 1, <hyperparameter>: ...}
ClassifierSpec classifier_from_json(const json& j, Reader& r);

json to_json(const ResampleSpec& spec);
ResampleSpec resample_from_json(const json& j, Reader& r);

// {"training_weeks": 26, "testing_weeks": 1, "step_weeks": 1}
json to_json(const WindowConfig& config);
WindowConfig window_from_json(const json& j, Reader& r);

json to_json(const TextModelOptions& options);
TextModelOptions text_options_from_json(const json& j, Reader& r);

// "paper-rq5" or an object overriding its fields.
json to_json(const SavingsParams& p);
SavingsParams savings_from_json(const json& j, Reader& r);
json to_json(const SavingsReport& r);

// "reference" or an object: {"base": "reference"|"empty", "noise_rate": ..,
// "crosstalk_rate": .., "counts": {"ST1": 1160, ...}, "start": "2018-01-01", ...}
SyntheticSpec synthetic_from_json(const json& j, Reader& r);

// --- dataset sources -----------------------------------------------------------------------

// One of {"synthetic": <spec>, "seed": N}, {"csv": "<inline text>"}, {"path": "file.csv"}.
struct DatasetSource {
  enum class Kind { synthetic, csv_text, csv_file };
  Kind kind = Kind::synthetic;
  SyntheticSpec synthetic = SyntheticSpec::reference_defaults();
  std::uint64_t seed = 42;
  std::string text;  // csv_text: the document; csv_file: the path
};

DatasetSource dataset_from_json(const json& j, Reader& r);
json to_json(const DatasetSource& d);
// Generates or ingests the corpus. CSV ingestion errors are reported, not thrown.
IngestResult load_dataset(const DatasetSource& d);
json to_json(const IngestReport& report);

// --- results -----------------------------------------------------------------------------

json to_json(const ConfusionMatrix& cm);
ConfusionMatrix confusion_from_json(const json& j);
json to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const json& j);
json to_json(const SlidingWindowReport& report);
json to_json(const AssignmentResult& result);
json to_json(const TTestResult& t);

}  // namespace triage::schema
