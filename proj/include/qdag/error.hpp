#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qdag {

/// Malformed input text. `position` is a byte offset or a 1-based line
/// number depending on the format; `what()` always says which.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : std::runtime_error(msg), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Well-formed input that violates a model invariant (cycle, bad CPT row, ...).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reference to a variable, value or node that does not exist.
class LookupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evidence under which a requested conditional is undefined.
class ZeroProbabilityError : public std::runtime_error {
 public:
  ZeroProbabilityError() : std::runtime_error("evidence has zero probability") {}
};

}  // namespace qdag
