// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace nnlft {

/// Invalid configuration: bad ratios, negative lambda, empty splits, etc.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// A value outside its admissible interval (timestamps, weights).
class RangeError : public DataError {
 public:
  using DataError::DataError;
};

/// An (i, j, k) index outside the tensor shape.
class BoundsError : public DataError {
 public:
  using DataError::DataError;
};

class EvalError : public DataError {
 public:
  using DataError::DataError;
};

/// Training produced a non-finite parameter or velocity.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, std::size_t entry_index, int epoch)
      : std::runtime_error(what), entry_index_(entry_index), epoch_(epoch) {}

  std::size_t entry_index() const noexcept { return entry_index_; }
  int epoch() const noexcept { return epoch_; }

 private:
  std::size_t entry_index_;
  int epoch_;
};

}  // namespace nnlft
