#pragma once

#include <stdexcept>
#include <string>

namespace xaieval {

// Base for every error the library raises on bad input or bad state.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector or matrix dimensions that do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside its documented domain (class index, step count, ratio...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed, truncated or version-mismatched file content.
class DecodeError : public Error {
 public:
  using Error::Error;
};

// Dataset ingestion and schema problems.
class DataError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration problems (missing files, unknown keys, bad values).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace xaieval
