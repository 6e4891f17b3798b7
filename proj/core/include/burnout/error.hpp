#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace burnout {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FieldError {
  std::string field;
  std::string message;
};

// Bad user input. Carries every offending field, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<FieldError> fields)
      : Error(summarize(fields)), fields_(std::move(fields)) {}
  ValidationError(std::string field, std::string message)
      : ValidationError(std::vector<FieldError>{{std::move(field), std::move(message)}}) {}

  const std::vector<FieldError>& fields() const noexcept { return fields_; }

 private:
  static std::string summarize(const std::vector<FieldError>& fields) {
    std::string out = "validation failed:";
    for (const auto& f : fields) out += " " + f.field + " (" + f.message + ");";
    return out;
  }

  std::vector<FieldError> fields_;
};

// Structural problem with an input file: wrong header, unparseable cell, bad bundle field.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A bundle written by an unknown format revision.
class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

// Numerically undefined quantity (zero variance, constant input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace burnout
