#pragma once

#include <stdexcept>
#include <string>

namespace arganno {

// Bad API usage or bad command-line invocation. CLI exit code 2.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data. CLI exit code 1.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// Structurally valid input that violates a data contract. CLI exit code 1.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite values or shape mismatches inside the numerical core.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace arganno
