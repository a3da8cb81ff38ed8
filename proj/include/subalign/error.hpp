#pragma once

#include <stdexcept>
#include <string>

namespace subalign {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Invalid user-facing configuration (bad counts, unknown ids, out-of-range d).
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Matrix/vector dimensions do not agree.
class ShapeError : public Error {
  public:
    using Error::Error;
};

/// Malformed input file. Carries the 1-based row the problem was found on.
class ParseError : public Error {
  public:
    ParseError(const std::string &what, std::size_t row)
        : Error(what + " (row " + std::to_string(row) + ")"), row_(row) {}
    std::size_t row() const noexcept { return row_; }

  private:
    std::size_t row_;
};

class EncodingError : public Error {
  public:
    using Error::Error;
};

/// An operator handed to a quantum routine failed its structural check
/// (not unitary, projector not idempotent, ...).
class ValidationError : public Error {
  public:
    using Error::Error;
};

class RangeError : public Error {
  public:
    using Error::Error;
};

/// Phase register too narrow to resolve the requested eigen-structure.
class PrecisionError : public Error {
  public:
    using Error::Error;
};

class IllConditionedError : public Error {
  public:
    using Error::Error;
};

/// Postselection outcome has (numerically) zero probability.
class PostselectionError : public Error {
  public:
    using Error::Error;
};

/// A Gram matrix has fewer significant eigenvalues than components requested.
class RankDeficiencyError : public Error {
  public:
    using Error::Error;
};

/// Requested simulation exceeds a desk-scale register budget.
class CapError : public Error {
  public:
    using Error::Error;
};

} // namespace subalign
