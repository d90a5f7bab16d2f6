#pragma once

#include <stdexcept>
#include <string>

namespace pforest {

// Caller passed arguments that violate an operation's preconditions.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input data is malformed or inconsistent (bad UCR file, label mismatch, ...).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Base of all model persistence failures.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelIoError : public ModelError {
 public:
  using ModelError::ModelError;
};

class ModelVersionError : public ModelError {
 public:
  using ModelError::ModelError;
};

class ModelCorruptError : public ModelError {
 public:
  using ModelError::ModelError;
};

}  // namespace pforest
