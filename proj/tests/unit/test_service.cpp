// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <future>
#include <thread>

#include "httplib.h"
#include "support.hpp"
#include "triage/csv.hpp"
#include "triage/error.hpp"
#include "triage/service/service.hpp"

namespace triage::service {
namespace {

namespace fs = std::filesystem;
using namespace std::chrono_literals;

struct TempDir {
  fs::path path;
  TempDir() {
    static std::atomic<int> counter{0};
    path = fs::temp_directory_path() /
           ("triage-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

// Small noise-free corpus shared by every test in this file.
const std::vector<TokenizedDocument>& small_docs() {
  static const auto docs = [] {
    auto spec = testing::noise_free_spec();
    for (auto& s : spec.subteams) s.count = s.count / 8 + 10;
    return testing::preprocess_all(generate_synthetic(spec, 4));
  }();
  return docs;
}

TrainedModel fit(ClassifierKind kind, Experiment e) {
  ClassifierSpec spec;
  spec.kind = kind;
  return *testing::fit_stage(spec, small_docs(), e);
}

struct Ids {
  std::string flat, team, a, b;
};

Ids register_models(ModelRegistry& reg, ClassifierKind kind = ClassifierKind::naive_bayes_multinomial) {
  return {reg.add(fit(kind, Experiment::E1), nullptr, "flat").model_id,
          reg.add(fit(kind, Experiment::E2), nullptr, "team").model_id,
          reg.add(fit(kind, Experiment::E3), nullptr, "T_A").model_id,
          reg.add(fit(kind, Experiment::E4), nullptr, "T_B").model_id};
}

// --- stores ---------------------------------------------------------------------------------

TEST(Stores, BlobAndDocumentRoundTrip) {
  TempDir dir;
  FsBlobStore blobs(dir.path / "b");
  FsDocumentStore docs(dir.path / "d");
  EXPECT_FALSE(blobs.exists("x"));
  EXPECT_FALSE(blobs.get("x"));
  const std::string bytes("a\0b\xff", 4);
  blobs.put("x", bytes);
  EXPECT_EQ(*blobs.get("x"), bytes);
  EXPECT_THROW(blobs.put("../escape", "no"), ValidationError);

  EXPECT_TRUE(docs.list("c").empty());
  docs.put("c", "b", {{"v", 2}});
  docs.put("c", "a", {{"v", 1}});
  EXPECT_EQ(docs.get("c", "a")->at("v"), 1);
  const auto all = docs.list("c");
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].at("v"), 1);
  EXPECT_FALSE(docs.get("c", "zz"));
}

TEST(Stores, Ids) {
  EXPECT_TRUE(is_safe_id("mdl-1.a_b"));
  EXPECT_FALSE(is_safe_id(""));
  EXPECT_FALSE(is_safe_id("a/b"));
  EXPECT_FALSE(is_safe_id(".."));
  EXPECT_NE(new_id("job"), new_id("job"));
  EXPECT_TRUE(new_id("job").starts_with("job-"));
}

// --- registry and deployment ----------------------------------------------------------------

TEST(Registry, AddListLoadReport) {
  TempDir dir;
  FsBlobStore blobs(dir.path / "b");
  FsDocumentStore docs(dir.path / "d");
  ModelRegistry reg(blobs, docs);
  EXPECT_TRUE(reg.list().empty());

  std::vector<TokenizedDocument> stage = experiment_documents(small_docs(), Experiment::E2);
  CrossValidationOptions cv;
  cv.folds = 3;
  cv.repeats = 1;
  ClassifierSpec spec;
  spec.kind = ClassifierKind::naive_bayes_multinomial;
  const auto report = cross_validate(spec, stage, experiment_labels(Experiment::E2), cv);
  const TrainedModel model = fit(ClassifierKind::naive_bayes_multinomial, Experiment::E2);
  const auto entry = reg.add(model, &report, "team");

  const auto listed = reg.list();
  ASSERT_EQ(listed.size(), 1u);
  EXPECT_EQ(listed[0].model_id, entry.model_id);
  EXPECT_EQ(listed[0].stage, "team");
  EXPECT_TRUE(blobs.exists(entry.artifact));

  // A fresh registry reads the model back from the stores.
  ModelRegistry again(blobs, docs);
  const auto loaded = again.load(entry.model_id);
  for (const auto& d : stage) {
    EXPECT_EQ(loaded->predict(tfidf(d, loaded->space())).scores, model.predict(tfidf(d, model.space())).scores);
  }
  const auto back = again.report(entry.model_id);
  EXPECT_EQ(schema::to_json(back), schema::to_json(report));
  EXPECT_EQ(back.confusion, report.confusion);
  EXPECT_EQ(back.runs.size(), report.runs.size());

  EXPECT_THROW(again.load("mdl-missing"), NotFoundError);
  EXPECT_THROW(again.report("mdl-missing"), NotFoundError);
  EXPECT_FALSE(again.find("../etc"));
}

TEST(Deployment, ActivateValidateRestore) {
  TempDir dir;
  FsBlobStore blobs(dir.path / "b");
  FsDocumentStore docs(dir.path / "d");
  ModelRegistry reg(blobs, docs);
  const auto sw = std::make_shared<const StopwordList>(StopwordList::rainbow());
  DeploymentManager dm(reg, docs, sw);
  EXPECT_FALSE(dm.current());
  const Ids ids = register_models(reg);

  const auto v1 = dm.activate(Strategy::S2, {ids.b, ids.team, ids.a});
  EXPECT_EQ(v1->deployment.version, 1u);
  EXPECT_EQ(v1->deployment.model_ids, (std::vector<std::string>{ids.team, ids.a, ids.b}));

  EXPECT_THROW(dm.activate(Strategy::S2, {ids.team, ids.a, "mdl-nope"}), NotFoundError);
  EXPECT_THROW(dm.activate(Strategy::S2, {ids.team, ids.a}), ValidationError);
  EXPECT_THROW(dm.activate(Strategy::S2, {ids.team, ids.a, ids.flat}), ValidationError);
  EXPECT_THROW(dm.activate(Strategy::S1, {ids.team}), ValidationError);
  EXPECT_EQ(dm.current(), v1);

  const auto v2 = dm.activate(Strategy::S1, {ids.flat});
  EXPECT_EQ(v2->deployment.version, 2u);
  EXPECT_EQ(v2->pipeline.strategy(), Strategy::S1);

  DeploymentManager restored(reg, docs, sw);
  restored.restore();
  ASSERT_TRUE(restored.current());
  EXPECT_EQ(restored.current()->deployment.version, 2u);
  EXPECT_EQ(restored.activate(Strategy::S1, {ids.flat})->deployment.version, 3u);
}

// --- jobs -------------------------------------------------------------------------------------

TEST(Jobs, LifecycleAndFailures) {
  TempDir dir;
  FsDocumentStore docs(dir.path / "d");
  JobQueue q(
      docs,
      [](const json& req) -> json {
        if (req.value("fail", false)) throw std::runtime_error("boom");
        return {{"echo", req.at("n")}};
      },
      2);
  q.start();
  const auto a = q.submit({{"n", 1}});
  const auto b = q.submit({{"n", 2}, {"fail", true}});
  EXPECT_NE(a, b);
  const auto ja = q.wait(a, 10s);
  const auto jb = q.wait(b, 10s);
  ASSERT_TRUE(ja && jb);
  EXPECT_EQ(ja->state, JobState::succeeded);
  EXPECT_EQ(ja->result.at("echo"), 1);
  EXPECT_TRUE(ja->started && ja->finished);
  EXPECT_LE(ja->created, *ja->started);
  EXPECT_LE(*ja->started, *ja->finished);
  EXPECT_EQ(jb->state, JobState::failed);
  EXPECT_EQ(jb->error, "boom");
  EXPECT_EQ(q.list().size(), 2u);
  EXPECT_FALSE(q.get("job-unknown"));
  q.stop();
  // The journal has the terminal states.
  EXPECT_EQ(job_from_json(*docs.get("jobs", a)).state, JobState::succeeded);
}

TEST(Jobs, RestartRecoversJournal) {
  TempDir dir;
  FsDocumentStore docs(dir.path / "d");
  Job running;
  running.job_id = "job-r";
  running.request = {{"n", 1}};
  running.state = JobState::running;
  running.started = running.created;
  Job queued;
  queued.job_id = "job-q";
  queued.request = {{"n", 2}};
  docs.put("jobs", running.job_id, to_json(running));
  docs.put("jobs", queued.job_id, to_json(queued));

  JobQueue q(docs, [](const json& req) -> json { return req; }, 1);
  q.start();
  const auto r = q.get("job-r");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->state, JobState::failed);
  EXPECT_FALSE(r->error.empty());
  const auto done = q.wait("job-q", 10s);
  ASSERT_TRUE(done);
  EXPECT_EQ(done->state, JobState::succeeded);
}

// --- config -----------------------------------------------------------------------------------

TEST(Config, EnvironmentOverrides) {
  std::map<std::string, std::string> env{{"TRIAGE_LISTEN", "0.0.0.0:9001"},
                                         {"TRIAGE_WORKERS", "3"},
                                         {"TRIAGE_MAX_UPLOAD_BYTES", "1024"}};
  auto lookup = [&](const char* k) -> std::optional<std::string> {
    auto it = env.find(k);
    if (it == env.end()) return std::nullopt;
    return it->second;
  };
  const auto c = load_server_config(std::nullopt, lookup);
  EXPECT_EQ(c.host, "0.0.0.0");
  EXPECT_EQ(c.port, 9001);
  EXPECT_EQ(c.workers, 3);
  EXPECT_EQ(c.max_upload_bytes, 1024u);

  TempDir dir;
  const auto file = dir.path / "server.json";
  std::ofstream(file) << R"({"port": 7000, "workers": 2})";
  env.erase("TRIAGE_LISTEN");
  const auto d = load_server_config(file.string(), lookup);
  EXPECT_EQ(d.port, 7000);
  EXPECT_EQ(d.workers, 3);

  env["TRIAGE_WORKERS"] = "zero";
  EXPECT_THROW(load_server_config(std::nullopt, lookup), ValidationError);
  std::ofstream(file) << R"({"prot": 7000})";
  env.erase("TRIAGE_WORKERS");
  EXPECT_THROW(load_server_config(file.string(), lookup), ValidationError);
}

// --- HTTP --------------------------------------------------------------------------------------

class Http : public ::testing::Test {
 protected:
  void SetUp() override {
    ServerConfig c;
    c.port = 0;
    c.blob_root = (dir_.path / "blobs").string();
    c.doc_root = (dir_.path / "docs").string();
    c.http_threads = 16;
    service_ = std::make_unique<Service>(c);
    server_ = std::thread([this] { service_->listen(); });
    for (int i = 0; i < 500 && !(service_->is_running() && service_->bound_port() > 0); ++i) {
      std::this_thread::sleep_for(10ms);
    }
    ASSERT_TRUE(service_->is_running());
  }
  void TearDown() override {
    service_->stop();
    if (server_.joinable()) server_.join();
    service_.reset();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", service_->bound_port());
    c.set_read_timeout(60, 0);
    return c;
  }

  static json body(const httplib::Result& r) { return json::parse(r->body); }

  json put_deployment(const std::string& strategy, const std::vector<std::string>& ids) {
    auto r = client().Put("/api/v1/deployment", json{{"strategy", strategy}, {"model_ids", ids}}.dump(),
                          "application/json");
    if (!r) {
      ADD_FAILURE() << "deployment request failed: " << httplib::to_string(r.error());
      return {{"version", -1}};
    }
    EXPECT_EQ(r->status, 200) << r->body;
    return body(r);
  }

  TempDir dir_;
  std::unique_ptr<Service> service_;
  std::thread server_;
};

TEST_F(Http, ClassifyErrors) {
  auto c = client();
  auto health = c.Get("/api/v1/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_TRUE(body(health).at("deployment_version").is_null());

  auto blank = c.Post("/api/v1/classify", R"({"summary": " ", "description": ""})", "application/json");
  ASSERT_TRUE(blank);
  EXPECT_EQ(blank->status, 422);
  EXPECT_EQ(body(blank).at("fields").size(), 2u);

  auto none = c.Post("/api/v1/classify", R"({"summary": "login fails"})", "application/json");
  EXPECT_EQ(none->status, 409);
  EXPECT_EQ(c.Get("/api/v1/deployment")->status, 404);
  EXPECT_EQ(c.Post("/api/v1/classify", "{not json", "application/json")->status, 400);
  EXPECT_EQ(c.Post("/api/v1/classify", R"({"summary": 3})", "application/json")->status, 400);
  EXPECT_EQ(c.Get("/api/v1/models/mdl-x/report")->status, 404);
  EXPECT_EQ(c.Get("/api/v1/jobs/job-x")->status, 404);
  EXPECT_EQ(body(c.Get("/api/v1/models")), json::array());

  // Header-only batch needs no deployment.
  auto empty = c.Post("/api/v1/classify/batch", "key,summary,description\n", "text/csv");
  EXPECT_EQ(empty->status, 200);
  EXPECT_EQ(empty->body,
            "key,summary,description,team,subteam,team_confidence,subteam_confidence,error\r\n");
  EXPECT_EQ(c.Post("/api/v1/classify/batch", "key,title\n", "text/csv")->status, 400);
}

TEST_F(Http, DeploymentSwapRejectsBadRequests) {
  const Ids ids = register_models(service_->registry());
  const auto d1 = put_deployment("S2", {ids.team, ids.a, ids.b});
  EXPECT_EQ(d1.at("version"), 1);
  auto c = client();
  auto missing = c.Put("/api/v1/deployment", json{{"strategy", "S2"}, {"model_ids", {ids.team, ids.a}}}.dump(),
                       "application/json");
  EXPECT_EQ(missing->status, 422);
  auto dangling = c.Put("/api/v1/deployment",
                        json{{"strategy", "S2"}, {"model_ids", {ids.team, ids.a, "mdl-gone"}}}.dump(),
                        "application/json");
  EXPECT_EQ(dangling->status, 404);
  EXPECT_EQ(c.Put("/api/v1/deployment", R"({"model_ids": []})", "application/json")->status, 400);
  EXPECT_EQ(body(c.Get("/api/v1/deployment")).at("version"), 1);

  auto r = c.Post("/api/v1/classify", R"({"key": "N-1", "summary": "hello"})", "application/json");
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(body(r).at("deployment_version"), 1);
  EXPECT_EQ(body(r).at("strategy"), "S2");
  EXPECT_EQ(put_deployment("S1", {ids.flat}).at("version"), 2);
  r = c.Post("/api/v1/classify", R"({"summary": "hello"})", "application/json");
  EXPECT_EQ(body(r).at("deployment_version"), 2);
}

std::string random_cell(Rng& rng) {
  static const std::vector<std::string> parts{"alpha", "login", "Ação", ",", "\"", "\n", " ", "x1", "<b>", "err"};
  std::string s;
  for (std::size_t i = rng.index(6); i > 0; --i) s += parts[rng.index(parts.size())];
  return s;
}

TEST_F(Http, BatchPreservesRowsAndKeysOnFuzzedFiles) {
  const Ids ids = register_models(service_->registry());
  put_deployment("S2", {ids.team, ids.a, ids.b});
  const auto& tax = Taxonomy::standard();
  Rng rng(77);
  auto c = client();
  for (int trial = 0; trial < 40; ++trial) {
    const bool extra = rng.index(2) == 0;
    csv::Row header{"description", "key", "summary"};
    if (extra) header.push_back("reporter");
    std::string text = csv::format_row(header) + "\n";
    std::vector<std::string> keys;
    std::vector<bool> malformed, empty;
    const std::size_t n = rng.index(25);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string key = "K-" + std::to_string(trial) + "-" + std::to_string(i) + (rng.index(4) ? "" : ",\"q\"");
      csv::Row row{random_cell(rng), key, random_cell(rng)};
      if (extra) row.push_back(random_cell(rng));
      const bool bad = rng.index(6) == 0;
      if (bad) row.push_back("surplus");
      keys.push_back(key);
      malformed.push_back(bad);
      empty.push_back(row[0].find_first_not_of(" \t\r\n") == std::string::npos &&
                      row[2].find_first_not_of(" \t\r\n") == std::string::npos);
      text += csv::format_row(row) + (rng.index(2) ? "\r\n" : "\n");
    }
    auto r = c.Post("/api/v1/classify/batch", text, "text/csv");
    ASSERT_TRUE(r);
    ASSERT_EQ(r->status, 200) << r->body;
    const auto out = csv::parse(r->body);
    ASSERT_EQ(out.rows.size(), n) << text;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& row = out.rows[i];
      ASSERT_EQ(row.size(), 8u);
      EXPECT_EQ(row[0], keys[i]);
      if (malformed[i] || empty[i]) {
        EXPECT_FALSE(row[7].empty()) << keys[i];
        EXPECT_TRUE(row[3].empty());
      } else {
        EXPECT_TRUE(row[7].empty()) << row[7];
        EXPECT_EQ(tax.team_of(row[4]), row[3]);
      }
    }
    auto rj = c.Post("/api/v1/classify/batch?format=json", text, "text/csv");
    ASSERT_EQ(rj->status, 200);
    const auto arr = body(rj);
    ASSERT_EQ(arr.size(), n);
    for (std::size_t i = 0; i < n; ++i) EXPECT_EQ(arr[i].at("key"), keys[i]);
  }
}

TEST_F(Http, SwapStormResponsesAreVersionConsistent) {
  auto& reg = service_->registry();
  const Ids nb = register_models(reg);
  const Ids zr = register_models(reg, ClassifierKind::zero_r);
  std::mutex m;
  std::map<int, json> versions;
  auto record = [&](const json& d) {
    std::lock_guard lock(m);
    versions[d.at("version").get<int>()] = d;
  };
  record(put_deployment("S2", {nb.team, nb.a, nb.b}));

  std::atomic<bool> done{false};
  std::thread swapper([&] {
    int i = 0;
    while (!done) {
      switch (i++ % 3) {
        case 0: record(put_deployment("S1", {zr.flat})); break;
        case 1: record(put_deployment("S2", {zr.team, zr.a, zr.b})); break;
        default: record(put_deployment("S2", {nb.team, nb.a, nb.b})); break;
      }
      std::this_thread::sleep_for(2ms);
    }
  });

  std::vector<std::future<std::vector<json>>> clients;
  for (int t = 0; t < 100; ++t) {
    clients.push_back(std::async(std::launch::async, [this, t] {
      std::vector<json> got;
      auto c = client();
      for (int k = 0; k < 5; ++k) {
        auto r = c.Post("/api/v1/classify",
                        json{{"key", "S-" + std::to_string(t)}, {"summary", "storm request " + std::to_string(k)}}.dump(),
                        "application/json");
        if (r && r->status == 200) got.push_back(json::parse(r->body));
      }
      return got;
    }));
  }
  std::vector<std::vector<json>> all;
  for (auto& f : clients) all.push_back(f.get());
  done = true;
  swapper.join();

  const auto& tax = Taxonomy::standard();
  std::size_t responses = 0;
  for (const auto& per_client : all) {
    int last_version = 0;
    for (const auto& r : per_client) {
      ++responses;
      const int v = r.at("deployment_version").get<int>();
      EXPECT_GE(v, last_version);
      last_version = v;
      std::lock_guard lock(m);
      ASSERT_TRUE(versions.count(v)) << v;
      const auto& d = versions.at(v);
      EXPECT_EQ(r.at("strategy"), d.at("strategy"));
      EXPECT_EQ(r.at("model_ids"), d.at("model_ids"));
      EXPECT_EQ(tax.team_of(r.at("subteam").get<std::string>()), r.at("team").get<std::string>());
    }
  }
  EXPECT_EQ(responses, 500u);
  EXPECT_GT(versions.size(), 2u);
}

TEST_F(Http, TrainJobProducesChainAndServes) {
  auto c = client();
  auto bad = c.Post("/api/v1/train", R"({"classifiers": [{"kind": "perceptron"}]})", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_TRUE(body(bad).contains("fields"));

  const json request{
      {"dataset",
       {{"synthetic", {{"noise_rate", 0.0}, {"crosstalk_rate", 0.0},
                       {"counts", {{"ST1", 150}, {"ST2", 100}, {"ST3", 40}, {"ST4", 220}, {"ST5", 180}, {"ST6", 60}}}}},
        {"seed", 3}}},
      {"strategy", "S2"},
      {"classifiers", json::array({{{"kind", "zero_r"}}, {{"kind", "naive_bayes_multinomial"}}})},
      {"folds", 3},
      {"activate", true}};
  auto first = c.Post("/api/v1/train", request.dump(), "application/json");
  auto second = c.Post("/api/v1/train", request.dump(), "application/json");
  ASSERT_EQ(first->status, 202);
  ASSERT_EQ(second->status, 202);
  const std::string id = body(first).at("job_id");
  EXPECT_NE(id, body(second).at("job_id").get<std::string>());

  const auto job = service_->jobs().wait(id, 120s);
  ASSERT_TRUE(job);
  ASSERT_EQ(job->state, JobState::succeeded) << job->error;
  const auto model_ids = job->result.at("model_ids").get<std::vector<std::string>>();
  EXPECT_EQ(model_ids.size(), 3u);
  ASSERT_TRUE(service_->jobs().wait(body(second).at("job_id"), 120s));

  auto listed = body(c.Get("/api/v1/models"));
  EXPECT_EQ(listed.size(), 6u);
  auto report = c.Get(("/api/v1/models/" + model_ids[0] + "/report").c_str());
  ASSERT_EQ(report->status, 200);
  EXPECT_EQ(body(report).at("classifier").get<std::string>().find("naive_bayes"), 0u);

  auto fetched = body(c.Get(("/api/v1/jobs/" + id).c_str()));
  EXPECT_EQ(fetched.at("state"), "succeeded");
  EXPECT_GE(body(c.Get("/api/v1/deployment")).at("version").get<int>(), 1);
}

TEST_F(Http, MeanClassifyLatencyOnChainedPipeline) {
  auto& reg = service_->registry();
  const Ids nb = register_models(reg);
  put_deployment("S2", {nb.team, nb.a, nb.b});
  auto c = client();
  const auto& docs = small_docs();
  double total_ms = 0;
  for (int i = 0; i < 100; ++i) {
    std::string summary;
    for (const auto& t : docs[static_cast<std::size_t>(i) * 7 % docs.size()].tokens) summary += t + " ";
    const auto start = std::chrono::steady_clock::now();
    auto r = c.Post("/api/v1/classify", json{{"summary", summary + "issue"}}.dump(), "application/json");
    total_ms += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    ASSERT_EQ(r->status, 200);
  }
  EXPECT_LT(total_ms / 100.0, 200.0);
}

}  // namespace
}  // namespace triage::service
