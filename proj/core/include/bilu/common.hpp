#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace bilu {

/// Row/column index type. 32 bits covers the 1.7M-row Poisson problem and
/// its 12M nonzeros with room to spare.
using index_t = std::int32_t;

inline constexpr index_t npos = -1;

/// Malformed sparse structure: out-of-range index, unsorted row, missing
/// diagonal, pattern that does not contain the matrix it should cover.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operand sizes that do not agree (vector length vs. matrix dimension,
/// block size that does not divide the dimension, ...).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical breakdown during factorization. `row()` is the (block) row of
/// the offending pivot, or npos when the failing kernel does not know it.
class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(const std::string& what, index_t row = npos)
      : std::runtime_error(what), row_(row) {}

  index_t row() const noexcept { return row_; }

 private:
  index_t row_;
};

/// Matrix Market input that cannot be interpreted; `line()` is 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace bilu
