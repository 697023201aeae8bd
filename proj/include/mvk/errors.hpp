#pragma once

#include <stdexcept>
#include <string>

namespace mvk {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed surface syntax; `position` is the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t position)
      : Error(msg + " (at position " + std::to_string(position) + ")"),
        position(position) {}
  std::size_t position;
};

// A search or construction would exceed a configured resource cap.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

// Structurally invalid input or a violated operation precondition.
class DomainError : public Error {
 public:
  enum class Kind {
    MissingBinding,
    UnknownVariable,
    NotAPreorder,
    NotPreBooleanAlgebra,
    ClusterTooLarge,
    NotDense,
    InvariantViolation,
    MissingRelation,
    BadUltrafilter,
    NotRefinementDirected,
    BadInput,
  };

  DomainError(Kind kind, const std::string& msg) : Error(msg), kind(kind) {}
  Kind kind;
};

}  // namespace mvk
