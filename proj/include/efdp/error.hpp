#pragma once

#include <stdexcept>
#include <string>

namespace efdp {

// Problems with input data (treebanks, embedding files, model files).
// The CLI maps these to exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed CoNLL / embedding text; carries the 1-based line number.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A sentence whose heads do not form a single-rooted tree.
class ValidationError : public DataError {
 public:
  using DataError::DataError;
};

// Bad model file: magic, version, truncation, unknown entries.
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

// Invalid configuration or usage. The CLI maps these to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch between tensor operands.
class ShapeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// NaN or Inf produced by a forward op.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace efdp
