// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "triage/assign.hpp"
#include "triage/evaluate.hpp"
#include "triage/service/schema.hpp"
#include "triage/service/stores.hpp"

namespace httplib {
class Server;
}

namespace triage::service {

using nlohmann::json;

// --- registry ------------------------------------------------------------------------------

struct ModelEntry {
  std::string model_id;
  std::string artifact;  // blob key
  std::string classifier;
  std::string stage;     // flat, team, T_A, T_B, or empty
  std::vector<std::string> label_set;
  std::optional<std::pair<Timestamp, Timestamp>> training_window;
  std::string report_id;  // empty when no report was stored
  Timestamp created_at{};
};

json to_json(const ModelEntry& e);
ModelEntry entry_from_json(const json& j);

class ModelRegistry {
 public:
  ModelRegistry(BlobStore& blobs, DocumentStore& docs);

  // Stores the artifact, the report (keyed by the model id) and the entry.
  ModelEntry add(TrainedModel model, const EvaluationReport* report, std::string stage = {});
  // Ordered by created_at, then id.
  std::vector<ModelEntry> list() const;
  std::optional<ModelEntry> find(const std::string& model_id) const;
  // Throws NotFoundError for an unknown id.
  std::shared_ptr<const TrainedModel> load(const std::string& model_id) const;
  EvaluationReport report(const std::string& model_id) const;
  json report_json(const std::string& model_id) const;

 private:
  BlobStore& blobs_;
  DocumentStore& docs_;
  mutable std::shared_mutex mutex_;
  mutable std::map<std::string, std::shared_ptr<const TrainedModel>> cache_;
};

// --- deployment ----------------------------------------------------------------------------

struct Deployment {
  std::uint64_t version = 0;
  Strategy strategy = Strategy::S1;
  std::vector<std::string> model_ids;  // S2: team, T_A, T_B
  Timestamp activated_at{};
};

json to_json(const Deployment& d);

struct ActiveSnapshot {
  Deployment deployment;
  AssignmentPipeline pipeline;
};

// Holds the active pipeline. Readers take the current snapshot without locking;
// activation builds and validates a complete new snapshot before publishing it,
// so a request sees either the old pipeline or the new one.
class DeploymentManager {
 public:
  DeploymentManager(ModelRegistry& registry, DocumentStore& docs,
                    std::shared_ptr<const StopwordList> stopwords);

  // Reloads the persisted deployment, if any.
  void restore();
  // S1 takes one model id, S2 three (any order; roles come from label sets).
  // Throws NotFoundError for unknown ids and ValidationError for an invalid
  // pipeline; the active snapshot is untouched in both cases.
  std::shared_ptr<const ActiveSnapshot> activate(Strategy strategy, std::vector<std::string> model_ids);
  // nullptr when nothing is deployed.
  std::shared_ptr<const ActiveSnapshot> current() const;

 private:
  std::shared_ptr<const ActiveSnapshot> build(Strategy strategy, std::vector<std::string> model_ids,
                                              std::uint64_t version, Timestamp activated_at) const;

  ModelRegistry& registry_;
  DocumentStore& docs_;
  std::shared_ptr<const StopwordList> stopwords_;
  std::mutex write_mutex_;
  std::shared_ptr<const ActiveSnapshot> active_;  // accessed with std::atomic_load/store
};

// --- training --------------------------------------------------------------------------------

struct TrainingRequest {
  schema::DatasetSource dataset;
  Strategy strategy = Strategy::S2;
  std::vector<ClassifierSpec> classifiers;  // candidates; best mean CV accuracy wins per stage
  TextModelOptions text;
  int folds = 10;
  int repeats = 1;
  std::uint64_t seed = 1;
  // Train on the most recent training_window of the corpus only.
  std::optional<WindowConfig> window;
  bool activate = false;
};

// Throws ValidationError with field-level messages.
TrainingRequest parse_training_request(const json& j);

struct TrainingOutcome {
  std::vector<std::string> model_ids;  // S1: flat; S2: team, T_A, T_B
  std::vector<std::string> report_ids;
  json summary;
};

TrainingOutcome run_training(const TrainingRequest& request, ModelRegistry& registry,
                             const StopwordList& stopwords);

// --- jobs -------------------------------------------------------------------------------------

enum class JobState { queued, running, succeeded, failed };
std::string_view to_string(JobState s);

struct Job {
  std::string job_id;
  json request;
  JobState state = JobState::queued;
  Timestamp created{};
  std::optional<Timestamp> started;
  std::optional<Timestamp> finished;
  json result;  // set on success
  std::string error;
};

json to_json(const Job& job);
Job job_from_json(const json& j);

// Background queue with a fixed worker pool. Every transition is written to the
// "jobs" collection before it becomes visible. On start, queued jobs from the
// journal are queued again and jobs caught running are marked failed.
class JobQueue {
 public:
  using Handler = std::function<json(const json& request)>;

  JobQueue(DocumentStore& docs, Handler handler, int workers = 1);
  ~JobQueue();
  JobQueue(const JobQueue&) = delete;
  JobQueue& operator=(const JobQueue&) = delete;

  void start();
  void stop();
  std::string submit(json request);
  std::optional<Job> get(const std::string& job_id) const;
  std::vector<Job> list() const;
  std::size_t pending() const;
  // Blocks until the job reaches a terminal state or the timeout passes.
  std::optional<Job> wait(const std::string& job_id, std::chrono::milliseconds timeout) const;

 private:
  void worker();
  void persist(const Job& job);

  DocumentStore& docs_;
  Handler handler_;
  int workers_;
  mutable std::mutex mutex_;
  mutable std::condition_variable changed_;
  std::map<std::string, Job> jobs_;
  std::deque<std::string> queue_;
  std::vector<std::thread> threads_;
  bool stopping_ = false;
  bool started_ = false;
};

// --- server ------------------------------------------------------------------------------------

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string blob_root = "triage-data/blobs";
  std::string doc_root = "triage-data/docs";
  std::size_t max_upload_bytes = 32u << 20;
  int workers = 1;       // training jobs run concurrently
  int http_threads = 8;  // request handler threads
  std::string stopwords_path;  // empty: bundled list

  void validate() const;
};

json to_json(const ServerConfig& c);

// Reads an optional JSON file, then applies TRIAGE_LISTEN (host:port),
// TRIAGE_BLOB_ROOT, TRIAGE_DOC_ROOT, TRIAGE_MAX_UPLOAD_BYTES, TRIAGE_WORKERS,
// TRIAGE_HTTP_THREADS and TRIAGE_STOPWORDS from `env`.
ServerConfig load_server_config(const std::optional<std::string>& path,
                                const std::function<std::optional<std::string>(const char*)>& env);

// The classification and training service with its stores.
class Service {
 public:
  explicit Service(ServerConfig config);
  ~Service();

  const ServerConfig& config() const { return config_; }
  ModelRegistry& registry() { return registry_; }
  DeploymentManager& deployment() { return deployment_; }
  JobQueue& jobs() { return jobs_; }
  const StopwordList& stopwords() const { return *stopwords_; }

  // Output CSV (or JSON array) for a batch body; throws ValidationError on a bad header.
  std::string classify_batch(std::string_view csv_body, bool as_json) const;

  void install_routes(httplib::Server& server);
  // Blocks serving on config().host:port (port 0 picks a free one; see bound_port()).
  bool listen();
  int bound_port() const { return bound_port_.load(); }
  void stop();
  bool is_running() const;

 private:
  ServerConfig config_;
  std::shared_ptr<const StopwordList> stopwords_;
  FsBlobStore blobs_;
  FsDocumentStore docs_;
  ModelRegistry registry_;
  DeploymentManager deployment_;
  JobQueue jobs_;
  std::unique_ptr<httplib::Server> http_;
  std::atomic<int> bound_port_{0};
};

}  // namespace triage::service
