#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace busched {

/// Instance or schedule violates a structural invariant (bad window, negative energy, ...).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// No schedule satisfies the charging constraints.
class Infeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scaled integer capacities or costs do not fit the flow solver's integer range.
class ScalingOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

/// A matched or fallback charging window is too short for the bus' energy need.
class WindowInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Synthetic generator parameters admit no feasible roster.
class GenerationInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input row. `row()` is 1-based and counts the header line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : std::runtime_error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// Well-formed row whose content violates the file schema.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& what, std::size_t row, std::string column)
      : std::runtime_error("row " + std::to_string(row) + ", column '" + column + "': " + what),
        row_(row),
        column_(std::move(column)) {}
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

/// Time series does not cover the requested horizon without holes.
class CoverageGap : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace busched
