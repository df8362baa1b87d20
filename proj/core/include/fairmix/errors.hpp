#pragma once

#include <stdexcept>
#include <string>

namespace fairmix {

// Mismatched dimensions, component counts, or malformed model/data pairs.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A discretization grid on which the model carries no probability mass.
class DegenerateGridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument outside the domain of a numerical routine (e.g. sigma - h <= 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Operation is only defined for a subset of models (e.g. 1-D, two components).
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Scenario parse/validation failure. `location` is a JSON pointer or "line:col".
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string location, const std::string& message)
      : std::runtime_error(location.empty() ? message : location + ": " + message),
        location_(std::move(location)) {}

  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

}  // namespace fairmix
