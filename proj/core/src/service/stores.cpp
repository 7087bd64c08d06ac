// SPDX-License-Identifier: Apache-2.0
#include "triage/service/stores.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "triage/error.hpp"
#include "triage/timeutil.hpp"

namespace triage::service {

namespace fs = std::filesystem;

bool is_safe_id(std::string_view id) {
  if (id.empty() || id.size() > 128 || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
           c == '_' || c == '.';
  });
}

std::string new_id(std::string_view prefix) {
  static std::atomic<std::uint32_t> counter{0};
  static const std::uint64_t salt = std::random_device{}();
  const std::string stamp = format_iso8601(now_seconds());  // YYYY-MM-DDTHH:MM:SSZ
  std::string digits;
  for (char c : stamp) {
    if (c >= '0' && c <= '9') digits.push_back(c);
  }
  const std::uint32_t n = counter.fetch_add(1);
  const auto mixed = static_cast<std::uint32_t>((salt ^ (salt >> 32)) + n * 0x9E3779B1u);
  char tail[9];
  std::snprintf(tail, sizeof tail, "%08x", mixed);
  return std::string(prefix) + "-" + digits + "-" + tail;
}

namespace {

void atomic_write(const fs::path& target, std::string_view bytes) {
  fs::create_directories(target.parent_path());
  static std::atomic<std::uint64_t> seq{0};
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(seq.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void check_id(const std::string& id, const char* what) {
  if (!is_safe_id(id)) throw ValidationError(std::string("invalid ") + what + " '" + id + "'");
}

}  // namespace

FsBlobStore::FsBlobStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path FsBlobStore::path_of(const std::string& key) const {
  check_id(key, "blob key");
  return root_ / key;
}

void FsBlobStore::put(const std::string& key, std::string_view bytes) { atomic_write(path_of(key), bytes); }

std::optional<std::string> FsBlobStore::get(const std::string& key) const { return read_file(path_of(key)); }

bool FsBlobStore::exists(const std::string& key) const { return fs::exists(path_of(key)); }

FsDocumentStore::FsDocumentStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path FsDocumentStore::file_of(const std::string& collection, const std::string& id) const {
  check_id(collection, "collection");
  check_id(id, "document id");
  return root_ / collection / (id + ".json");
}

void FsDocumentStore::put(const std::string& collection, const std::string& id, const nlohmann::json& doc) {
  const auto path = file_of(collection, id);
  std::lock_guard lock(mutex_);
  atomic_write(path, doc.dump(2));
}

std::optional<nlohmann::json> FsDocumentStore::get(const std::string& collection, const std::string& id) const {
  const auto path = file_of(collection, id);
  std::lock_guard lock(mutex_);
  auto text = read_file(path);
  if (!text) return std::nullopt;
  return nlohmann::json::parse(*text);
}

std::vector<nlohmann::json> FsDocumentStore::list(const std::string& collection) const {
  check_id(collection, "collection");
  const fs::path dir = root_ / collection;
  std::lock_guard lock(mutex_);
  std::vector<fs::path> files;
  if (fs::exists(dir)) {
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<nlohmann::json> out;
  out.reserve(files.size());
  for (const auto& f : files) {
    if (auto text = read_file(f)) out.push_back(nlohmann::json::parse(*text));
  }
  return out;
}

}  // namespace triage::service
