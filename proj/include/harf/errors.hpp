#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace harf {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed structured text (alphabet config, dataset line, rater CSV).
// line() is 1-based; 0 means the location is unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0)
      : Error(message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A document parsed but does not satisfy the expected schema
// (missing field, wrong type, duplicate id).
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A constructed value violates one of its declared invariants.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// A raw token survived every normalization rule and is not in the inventory.
class UnmappableTokenError : public Error {
 public:
  UnmappableTokenError(std::string token, std::size_t index)
      : Error("unmappable token '" + token + "' at index " +
              std::to_string(index)),
        token_(std::move(token)),
        index_(index) {}
  const std::string& token() const { return token_; }
  std::size_t index() const { return index_; }

 private:
  std::string token_;
  std::size_t index_;
};

// Numeric precondition failure (empty reference, n = 0, value out of range).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Statistic undefined on this input (constant vector, zero denominator).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Word spans do not tile the sequence they claim to partition.
class PartitionError : public Error {
 public:
  using Error::Error;
};

// A remote response arrived but failed contract validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Network failure that persisted through the retry budget.
class TransportError : public Error {
 public:
  using Error::Error;
};

// RTF requested but some records lack timing fields.
class MissingTimingError : public Error {
 public:
  explicit MissingTimingError(std::vector<std::string> ids)
      : Error(describe(ids)), ids_(std::move(ids)) {}
  MissingTimingError(std::string message, std::vector<std::string> ids)
      : Error(std::move(message)), ids_(std::move(ids)) {}
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  static std::string describe(const std::vector<std::string>& ids) {
    std::string msg = "missing audio/inference timing on " +
                      std::to_string(ids.size()) + " utterance(s):";
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (k == 8) {
        msg += " ...";
        break;
      }
      msg += " " + ids[k];
    }
    return msg;
  }

  std::vector<std::string> ids_;
};

// System score vector does not cover the rater subject set exactly.
class SubjectMismatchError : public Error {
 public:
  SubjectMismatchError(std::string message, std::vector<std::string> ids)
      : Error(std::move(message)), ids_(std::move(ids)) {}
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
};

}  // namespace harf
