// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace triage::service {

// Opaque byte blobs (model artifacts) addressed by key.
class BlobStore {
 public:
  virtual ~BlobStore() = default;
  virtual void put(const std::string& key, std::string_view bytes) = 0;
  virtual std::optional<std::string> get(const std::string& key) const = 0;
  virtual bool exists(const std::string& key) const = 0;
};

// JSON documents grouped in collections (models, reports, jobs, deployment).
class DocumentStore {
 public:
  virtual ~DocumentStore() = default;
  virtual void put(const std::string& collection, const std::string& id, const nlohmann::json& doc) = 0;
  virtual std::optional<nlohmann::json> get(const std::string& collection, const std::string& id) const = 0;
  // Every document in the collection, ordered by id.
  virtual std::vector<nlohmann::json> list(const std::string& collection) const = 0;
};

// Files under a root directory. Writes go to a temporary file that is renamed
// into place, so readers never see a partial document.
class FsBlobStore final : public BlobStore {
 public:
  explicit FsBlobStore(std::filesystem::path root);
  void put(const std::string& key, std::string_view bytes) override;
  std::optional<std::string> get(const std::string& key) const override;
  bool exists(const std::string& key) const override;
  std::filesystem::path path_of(const std::string& key) const;

 private:
  std::filesystem::path root_;
};

class FsDocumentStore final : public DocumentStore {
 public:
  explicit FsDocumentStore(std::filesystem::path root);
  void put(const std::string& collection, const std::string& id, const nlohmann::json& doc) override;
  std::optional<nlohmann::json> get(const std::string& collection, const std::string& id) const override;
  std::vector<nlohmann::json> list(const std::string& collection) const override;

 private:
  std::filesystem::path file_of(const std::string& collection, const std::string& id) const;
  std::filesystem::path root_;
  mutable std::mutex mutex_;
};

// Ids and keys are restricted to [A-Za-z0-9._-] so they are safe as file names.
bool is_safe_id(std::string_view id);
// "<prefix>-YYYYMMDDhhmmss-<8 hex>"
std::string new_id(std::string_view prefix);

}  // namespace triage::service
