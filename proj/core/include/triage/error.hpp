// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace triage {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input rejected before any work happened. Carries optional field-level detail.
class ValidationError : public Error {
 public:
  struct Field {
    std::string field;
    std::string message;
  };

  explicit ValidationError(const std::string& what) : Error(what) {}
  ValidationError(const std::string& what, std::vector<Field> fields)
      : Error(what), fields_(std::move(fields)) {}

  const std::vector<Field>& fields() const noexcept { return fields_; }

 private:
  std::vector<Field> fields_;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

// Operation is valid but the current state does not allow it (no deployment, ...).
class ConflictError : public Error {
 public:
  using Error::Error;
};

}  // namespace triage
