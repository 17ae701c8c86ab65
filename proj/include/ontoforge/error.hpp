#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ontoforge {

// Bad input data: malformed files, unknown ids, violated preconditions.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A record-oriented file failed to parse at a specific line.
class ParseError : public DataError {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : DataError(path + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A referenced record (assertion id, concept) does not exist.
class NotFoundError : public DataError {
 public:
  using DataError::DataError;
};

// The operation conflicts with the record's current state, e.g. relabeling
// without force or judging an unlabeled assertion.
class ConflictError : public DataError {
 public:
  using DataError::DataError;
};

// Invalid configuration values (hyperparameters, k, per_seed).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace ontoforge
