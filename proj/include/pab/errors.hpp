#pragma once

#include <stdexcept>
#include <string>

namespace pab {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent inputs: curve invariants, scenario files, schemas.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Arguments outside the domain of an operation (prices beyond the cap, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(what) {}
};

/// Filesystem failures, surfaced by the CLI as exit code 4.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace pab
