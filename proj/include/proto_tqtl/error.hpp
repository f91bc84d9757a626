#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace proto_tqtl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates one of a data type's invariants. `invariant()` names it.
class InvariantError : public Error {
 public:
  InvariantError(std::string invariant, const std::string& detail)
      : Error(detail.empty() ? invariant : invariant + ": " + detail),
        invariant_(std::move(invariant)) {}

  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

/// Malformed structured-text file (trace, model, dataset, config).
class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& detail)
      : Error("line " + std::to_string(line) + ": " + detail), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct SourceSpan {
  std::size_t line   = 1;
  std::size_t column = 1;
  std::size_t length = 0;

  bool operator==(const SourceSpan&) const = default;
};

/// Lexical or syntax error in TQTL text.
class ParseError : public Error {
 public:
  ParseError(SourceSpan span, std::string detail, std::vector<std::string> expected = {});

  const SourceSpan& span() const noexcept { return span_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  SourceSpan span_;
  std::string detail_;
  std::vector<std::string> expected_;
};

class EvalError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

} // namespace proto_tqtl
