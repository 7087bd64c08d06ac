// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "httplib.h"
#include "triage/csv.hpp"
#include "triage/error.hpp"
#include "triage/service/service.hpp"

namespace triage::service {

// --- config --------------------------------------------------------------------------------------

void ServerConfig::validate() const {
  std::vector<ValidationError::Field> bad;
  if (host.empty()) bad.push_back({"host", "must not be empty"});
  if (port < 0 || port > 65535) bad.push_back({"port", "must be between 0 and 65535"});
  if (blob_root.empty()) bad.push_back({"blob_root", "must not be empty"});
  if (doc_root.empty()) bad.push_back({"doc_root", "must not be empty"});
  if (max_upload_bytes == 0) bad.push_back({"max_upload_bytes", "must be positive"});
  if (workers < 1 || workers > 64) bad.push_back({"workers", "must be between 1 and 64"});
  if (http_threads < 1 || http_threads > 1024) bad.push_back({"http_threads", "must be between 1 and 1024"});
  if (!bad.empty()) throw ValidationError("invalid server configuration", std::move(bad));
}

json to_json(const ServerConfig& c) {
  return {{"host", c.host},
          {"port", c.port},
          {"blob_root", c.blob_root},
          {"doc_root", c.doc_root},
          {"max_upload_bytes", c.max_upload_bytes},
          {"workers", c.workers},
          {"http_threads", c.http_threads},
          {"stopwords_path", c.stopwords_path}};
}

namespace {

long long parse_env_int(const char* name, const std::string& value, std::vector<ValidationError::Field>& bad) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  bad.push_back({name, "not an integer: '" + value + "'"});
  return 0;
}

}  // namespace

ServerConfig load_server_config(const std::optional<std::string>& path,
                                const std::function<std::optional<std::string>(const char*)>& env) {
  ServerConfig c;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ValidationError("cannot read config file '" + *path + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw ValidationError("config file '" + *path + "' is not valid JSON: " + e.what());
    }
    schema::Reader r;
    if (!j.is_object()) r.fail("", "config must be a JSON object");
    else {
      r.known_fields(j, {"host", "port", "blob_root", "doc_root", "max_upload_bytes", "workers",
                         "http_threads", "stopwords_path"});
      if (auto v = r.string(j, "host")) c.host = *v;
      if (auto v = r.integer(j, "port")) c.port = static_cast<int>(*v);
      if (auto v = r.string(j, "blob_root")) c.blob_root = *v;
      if (auto v = r.string(j, "doc_root")) c.doc_root = *v;
      if (auto v = r.integer(j, "max_upload_bytes")) {
        if (*v <= 0) r.fail("max_upload_bytes", "must be positive");
        else c.max_upload_bytes = static_cast<std::size_t>(*v);
      }
      if (auto v = r.integer(j, "workers")) c.workers = static_cast<int>(*v);
      if (auto v = r.integer(j, "http_threads")) c.http_threads = static_cast<int>(*v);
      if (auto v = r.string(j, "stopwords_path")) c.stopwords_path = *v;
    }
    r.finish("invalid config file '" + *path + "'");
  }

  std::vector<ValidationError::Field> bad;
  if (auto v = env("TRIAGE_LISTEN")) {
    const auto colon = v->rfind(':');
    if (colon == std::string::npos) {
      bad.push_back({"TRIAGE_LISTEN", "expected host:port"});
    } else {
      if (colon > 0) c.host = v->substr(0, colon);
      c.port = static_cast<int>(parse_env_int("TRIAGE_LISTEN", v->substr(colon + 1), bad));
    }
  }
  if (auto v = env("TRIAGE_BLOB_ROOT")) c.blob_root = *v;
  if (auto v = env("TRIAGE_DOC_ROOT")) c.doc_root = *v;
  if (auto v = env("TRIAGE_MAX_UPLOAD_BYTES")) {
    const auto n = parse_env_int("TRIAGE_MAX_UPLOAD_BYTES", *v, bad);
    if (n > 0) c.max_upload_bytes = static_cast<std::size_t>(n);
    else bad.push_back({"TRIAGE_MAX_UPLOAD_BYTES", "must be positive"});
  }
  if (auto v = env("TRIAGE_WORKERS")) c.workers = static_cast<int>(parse_env_int("TRIAGE_WORKERS", *v, bad));
  if (auto v = env("TRIAGE_HTTP_THREADS")) {
    c.http_threads = static_cast<int>(parse_env_int("TRIAGE_HTTP_THREADS", *v, bad));
  }
  if (auto v = env("TRIAGE_STOPWORDS")) c.stopwords_path = *v;
  if (!bad.empty()) throw ValidationError("invalid environment override", std::move(bad));
  c.validate();
  return c;
}

// --- service ------------------------------------------------------------------------------------

namespace {

std::shared_ptr<const StopwordList> stopwords_for(const ServerConfig& c) {
  if (c.stopwords_path.empty()) return std::make_shared<const StopwordList>(StopwordList::rainbow());
  return std::make_shared<const StopwordList>(StopwordList::load(c.stopwords_path));
}

json error_body(const std::string& message, const std::vector<ValidationError::Field>& fields = {}) {
  json j{{"error", message}};
  if (!fields.empty()) {
    json fs = json::array();
    for (const auto& f : fields) fs.push_back({{"field", f.field}, {"message", f.message}});
    j["fields"] = std::move(fs);
  }
  return j;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Runs a handler and maps library errors to HTTP statuses.
template <typename F>
void guarded(httplib::Response& res, F&& body, int validation_status = 400) {
  try {
    body();
  } catch (const ValidationError& e) {
    send_json(res, validation_status, error_body(e.what(), e.fields()));
  } catch (const NotFoundError& e) {
    send_json(res, 404, error_body(e.what()));
  } catch (const ConflictError& e) {
    send_json(res, 409, error_body(e.what()));
  } catch (const json::exception& e) {
    send_json(res, 400, error_body(std::string("malformed JSON: ") + e.what()));
  } catch (const std::exception& e) {
    send_json(res, 500, error_body(e.what()));
  }
}

json parse_body(const httplib::Request& req) {
  try {
    return json::parse(req.body);
  } catch (const json::exception&) {
    throw ValidationError("request body is not valid JSON");
  }
}

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

json result_json(const AssignmentResult& r, const ActiveSnapshot& snap) {
  json j = schema::to_json(r);
  j["deployment_version"] = snap.deployment.version;
  j["strategy"] = to_string(snap.deployment.strategy);
  return j;
}

std::string format_confidence(double v) {
  std::ostringstream out;
  out.precision(6);
  out << std::fixed << v;
  return out.str();
}

}  // namespace

Service::Service(ServerConfig config)
    : config_((config.validate(), std::move(config))),
      stopwords_(stopwords_for(config_)),
      blobs_(config_.blob_root),
      docs_(config_.doc_root),
      registry_(blobs_, docs_),
      deployment_(registry_, docs_, stopwords_),
      jobs_(
          docs_,
          [this](const json& request) {
            const TrainingRequest req = parse_training_request(request);
            TrainingOutcome outcome = run_training(req, registry_, *stopwords_);
            json result{{"model_ids", outcome.model_ids},
                        {"report_ids", outcome.report_ids},
                        {"summary", std::move(outcome.summary)}};
            if (req.activate) {
              const auto snap = deployment_.activate(req.strategy, outcome.model_ids);
              result["deployment"] = to_json(snap->deployment);
            }
            return result;
          },
          config_.workers),
      http_(std::make_unique<httplib::Server>()) {
  try {
    deployment_.restore();
  } catch (const std::exception& e) {
    std::cerr << "triage: persisted deployment not restored: " << e.what() << '\n';
  }
  jobs_.start();
  install_routes(*http_);
}

Service::~Service() {
  stop();
  jobs_.stop();
}

std::string Service::classify_batch(std::string_view csv_body, bool as_json) const {
  const csv::Table table = csv::parse(csv_body);
  const int c_key = table.column("key");
  const int c_summary = table.column("summary");
  const int c_description = table.column("description");
  std::vector<ValidationError::Field> missing;
  if (c_key < 0) missing.push_back({"key", "missing column"});
  if (c_summary < 0) missing.push_back({"summary", "missing column"});
  if (c_description < 0) missing.push_back({"description", "missing column"});
  if (!missing.empty()) {
    throw ValidationError("batch CSV header must contain key, summary and description", std::move(missing));
  }

  // One snapshot for the whole batch.
  const auto snap = deployment_.current();
  if (!snap && !table.rows.empty()) throw ConflictError("no active deployment");

  const csv::Row out_header{"key", "summary", "description", "team", "subteam",
                            "team_confidence", "subteam_confidence", "error"};
  std::string text = csv::format_row(out_header) + "\r\n";
  json array = json::array();

  auto field = [](const csv::Row& row, int c) -> std::string {
    return c >= 0 && static_cast<std::size_t>(c) < row.size() ? row[static_cast<std::size_t>(c)] : std::string{};
  };
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const csv::Row& row = table.rows[i];
    csv::Row out{field(row, c_key), field(row, c_summary), field(row, c_description), "", "", "", "", ""};
    json item{{"key", out[0]}, {"summary", out[1]}, {"description", out[2]}};
    std::string error;
    if (row.size() != table.header.size()) {
      error = "line " + std::to_string(table.lines[i]) + ": expected " + std::to_string(table.header.size()) +
              " fields, found " + std::to_string(row.size());
    } else if (blank(out[1]) && blank(out[2])) {
      error = "line " + std::to_string(table.lines[i]) + ": summary and description are both empty";
    } else {
      try {
        const AssignmentResult r = assign(snap->pipeline, out[0], out[1], out[2]);
        out[3] = r.team;
        out[4] = r.subteam;
        out[5] = format_confidence(r.team_confidence);
        out[6] = format_confidence(r.subteam_confidence);
        item["team"] = r.team;
        item["subteam"] = r.subteam;
        item["team_confidence"] = r.team_confidence;
        item["subteam_confidence"] = r.subteam_confidence;
        item["low_evidence"] = r.low_evidence;
      } catch (const std::exception& e) {
        error = e.what();
      }
    }
    out[7] = error;
    item["error"] = error.empty() ? json(nullptr) : json(error);
    if (snap) item["deployment_version"] = snap->deployment.version;
    text += csv::format_row(out) + "\r\n";
    array.push_back(std::move(item));
  }
  return as_json ? array.dump() : text;
}

void Service::install_routes(httplib::Server& server) {
  server.set_payload_max_length(config_.max_upload_bytes);
  const int threads = config_.http_threads;
  server.new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<std::size_t>(threads)); };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.Options(R"(/api/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  server.Get("/api/v1/health", [this](const httplib::Request&, httplib::Response& res) {
    const auto snap = deployment_.current();
    send_json(res, 200,
              {{"status", "ok"},
               {"deployment_version", snap ? json(snap->deployment.version) : json(nullptr)},
               {"pending_jobs", jobs_.pending()},
               {"stopwords", {{"version", stopwords_->version()}, {"size", stopwords_->size()}}}});
  });

  server.Post("/api/v1/classify", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      schema::Reader r;
      if (!body.is_object()) r.fail("", "request must be a JSON object");
      else r.known_fields(body, {"key", "summary", "description"});
      std::string key, summary, description;
      if (body.is_object()) {
        if (auto v = r.string(body, "key")) key = *v;
        if (auto v = r.string(body, "summary")) summary = *v;
        if (auto v = r.string(body, "description")) description = *v;
      }
      r.finish("invalid classify request");
      if (blank(summary) && blank(description)) {
        send_json(res, 422,
                  error_body("summary and description are both empty",
                             {{"summary", "summary or description is required"},
                              {"description", "summary or description is required"}}));
        return;
      }
      const auto snap = deployment_.current();
      if (!snap) throw ConflictError("no active deployment");
      send_json(res, 200, result_json(assign(snap->pipeline, key, summary, description), *snap));
    });
  });

  server.Post("/api/v1/classify/batch", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const bool as_json = req.has_param("format") && req.get_param_value("format") == "json";
      if (req.has_param("format") && !as_json && req.get_param_value("format") != "csv") {
        throw ValidationError("format must be csv or json");
      }
      std::string out = classify_batch(req.body, as_json);
      res.status = 200;
      if (as_json) {
        res.set_content(std::move(out), "application/json");
      } else {
        res.set_header("Content-Disposition", "attachment; filename=\"classified.csv\"");
        res.set_content(std::move(out), "text/csv; charset=utf-8");
      }
    });
  });

  server.Post("/api/v1/train", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      parse_training_request(body);
      const std::string id = jobs_.submit(body);
      send_json(res, 202, {{"job_id", id}, {"state", "queued"}});
    });
  });

  server.Get("/api/v1/jobs", [this](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& job : jobs_.list()) out.push_back(to_json(job));
    send_json(res, 200, out);
  });

  server.Get("/api/v1/jobs/:id", [this](const httplib::Request& req, httplib::Response& res) {
    const auto job = jobs_.get(req.path_params.at("id"));
    if (!job) return send_json(res, 404, error_body("unknown job '" + req.path_params.at("id") + "'"));
    send_json(res, 200, to_json(*job));
  });

  server.Get("/api/v1/models", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      json out = json::array();
      for (const auto& e : registry_.list()) out.push_back(to_json(e));
      send_json(res, 200, out);
    });
  });

  server.Get("/api/v1/models/:id/report", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, registry_.report_json(req.path_params.at("id"))); });
  });

  server.Get("/api/v1/deployment", [this](const httplib::Request&, httplib::Response& res) {
    const auto snap = deployment_.current();
    if (!snap) return send_json(res, 404, error_body("no active deployment"));
    send_json(res, 200, to_json(snap->deployment));
  });

  server.Put("/api/v1/deployment", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(
        res,
        [&] {
          const json body = parse_body(req);
          schema::Reader r;
          Strategy strategy = Strategy::S2;
          std::vector<std::string> ids;
          if (!body.is_object()) {
            r.fail("", "request must be a JSON object");
          } else {
            r.known_fields(body, {"strategy", "model_ids"});
            if (auto s = r.string(body, "strategy")) {
              if (auto st = parse_strategy(*s)) strategy = *st;
              else r.fail("strategy", "must be S1 or S2");
            } else if (!body.contains("strategy")) {
              r.fail("strategy", "required");
            }
            if (auto v = r.strings(body, "model_ids")) ids = *v;
            else if (!body.contains("model_ids")) r.fail("model_ids", "required");
          }
          if (!r.ok()) {
            send_json(res, 400, error_body("invalid deployment request", r.errors()));
            return;
          }
          const auto snap = deployment_.activate(strategy, std::move(ids));
          send_json(res, 200, to_json(snap->deployment));
        },
        422);
  });
}

bool Service::listen() {
  int port = config_.port;
  if (port == 0) {
    port = http_->bind_to_any_port(config_.host);
    if (port < 0) return false;
  } else if (!http_->bind_to_port(config_.host, port)) {
    return false;
  }
  bound_port_.store(port);
  return http_->listen_after_bind();
}

void Service::stop() {
  if (http_) http_->stop();
}

bool Service::is_running() const { return http_ && http_->is_running(); }

}  // namespace triage::service
