// SPDX-License-Identifier: Apache-2.0
#include "triage/error.hpp"
#include "triage/service/service.hpp"

namespace triage::service {

namespace {

constexpr const char* kJobs = "jobs";

json time_or_null(const std::optional<Timestamp>& t) {
  return t ? json(format_iso8601(*t)) : json(nullptr);
}

std::optional<Timestamp> time_from(const json& j) {
  if (!j.is_string()) return std::nullopt;
  return parse_iso8601(j.get<std::string>());
}

}  // namespace

std::string_view to_string(JobState s) {
  switch (s) {
    case JobState::queued: return "queued";
    case JobState::running: return "running";
    case JobState::succeeded: return "succeeded";
    case JobState::failed: return "failed";
  }
  return "queued";
}

json to_json(const Job& job) {
  return {{"job_id", job.job_id},
          {"state", to_string(job.state)},
          {"request", job.request},
          {"created", format_iso8601(job.created)},
          {"started", time_or_null(job.started)},
          {"finished", time_or_null(job.finished)},
          {"result", job.result},
          {"error", job.error.empty() ? json(nullptr) : json(job.error)}};
}

Job job_from_json(const json& j) {
  Job job;
  job.job_id = j.at("job_id").get<std::string>();
  const auto state = j.at("state").get<std::string>();
  for (auto s : {JobState::queued, JobState::running, JobState::succeeded, JobState::failed}) {
    if (to_string(s) == state) job.state = s;
  }
  job.request = j.at("request");
  job.created = time_from(j.at("created")).value_or(Timestamp{});
  job.started = time_from(j.at("started"));
  job.finished = time_from(j.at("finished"));
  job.result = j.value("result", json(nullptr));
  if (j.contains("error") && j["error"].is_string()) job.error = j["error"].get<std::string>();
  return job;
}

JobQueue::JobQueue(DocumentStore& docs, Handler handler, int workers)
    : docs_(docs), handler_(std::move(handler)), workers_(std::max(1, workers)) {}

JobQueue::~JobQueue() { stop(); }

void JobQueue::persist(const Job& job) { docs_.put(kJobs, job.job_id, to_json(job)); }

void JobQueue::start() {
  std::unique_lock lock(mutex_);
  if (started_) return;
  started_ = true;
  stopping_ = false;
  std::vector<Job> journal;
  for (const auto& doc : docs_.list(kJobs)) journal.push_back(job_from_json(doc));
  std::sort(journal.begin(), journal.end(), [](const Job& a, const Job& b) {
    return a.created != b.created ? a.created < b.created : a.job_id < b.job_id;
  });
  for (auto& job : journal) {
    if (job.state == JobState::running) {
      job.state = JobState::failed;
      job.finished = now_seconds();
      job.error = "interrupted by a service restart";
      persist(job);
    } else if (job.state == JobState::queued) {
      queue_.push_back(job.job_id);
    }
    jobs_[job.job_id] = std::move(job);
  }
  for (int i = 0; i < workers_; ++i) threads_.emplace_back([this] { worker(); });
}

void JobQueue::stop() {
  {
    std::lock_guard lock(mutex_);
    if (!started_) return;
    stopping_ = true;
  }
  changed_.notify_all();
  for (auto& t : threads_) t.join();
  threads_.clear();
  std::lock_guard lock(mutex_);
  started_ = false;
}

std::string JobQueue::submit(json request) {
  Job job;
  job.job_id = new_id("job");
  job.request = std::move(request);
  job.created = now_seconds();
  {
    std::lock_guard lock(mutex_);
    persist(job);
    queue_.push_back(job.job_id);
    jobs_[job.job_id] = job;
  }
  changed_.notify_all();
  return job.job_id;
}

std::optional<Job> JobQueue::get(const std::string& job_id) const {
  std::lock_guard lock(mutex_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second;
}

std::vector<Job> JobQueue::list() const {
  std::lock_guard lock(mutex_);
  std::vector<Job> out;
  for (const auto& [id, job] : jobs_) out.push_back(job);
  return out;
}

std::size_t JobQueue::pending() const {
  std::lock_guard lock(mutex_);
  return queue_.size();
}

std::optional<Job> JobQueue::wait(const std::string& job_id, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mutex_);
  changed_.wait_for(lock, timeout, [&] {
    auto it = jobs_.find(job_id);
    return it == jobs_.end() || it->second.state == JobState::succeeded ||
           it->second.state == JobState::failed;
  });
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) return std::nullopt;
  return it->second;
}

void JobQueue::worker() {
  for (;;) {
    std::string id;
    json request;
    {
      std::unique_lock lock(mutex_);
      changed_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      id = queue_.front();
      queue_.pop_front();
      Job& job = jobs_.at(id);
      job.state = JobState::running;
      job.started = now_seconds();
      persist(job);
      request = job.request;
    }
    changed_.notify_all();

    json result;
    std::string error;
    try {
      result = handler_(request);
    } catch (const std::exception& e) {
      error = e.what();
    } catch (...) {
      error = "unknown error";
    }

    {
      std::lock_guard lock(mutex_);
      Job& job = jobs_.at(id);
      job.finished = now_seconds();
      if (error.empty()) {
        job.state = JobState::succeeded;
        job.result = std::move(result);
      } else {
        job.state = JobState::failed;
        job.error = std::move(error);
      }
      persist(job);
    }
    changed_.notify_all();
  }
}

}  // namespace triage::service
