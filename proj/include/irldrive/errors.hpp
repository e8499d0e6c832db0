#pragma once

#include <stdexcept>
#include <string>

namespace irldrive {

// Root of the library's exception hierarchy. The CLI maps each subclass onto
// a process exit code (see tools/irldrive.cpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input file is missing a required column or has a malformed header.
class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& column)
      : Error("missing required column: " + column), column_(column) {}
  SchemaError(const std::string& column, const std::string& what)
      : Error(what), column_(column) {}

  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

// Input data is well-formed but violates a content invariant.
class DataError : public Error {
 public:
  using Error::Error;
};

// A track is shorter than the smoothing window.
class TooShortError : public DataError {
 public:
  TooShortError(long vehicle_id, std::size_t samples, std::size_t required)
      : DataError("vehicle " + std::to_string(vehicle_id) + " has " +
                  std::to_string(samples) + " samples, smoothing needs " +
                  std::to_string(required)),
        vehicle_id_(vehicle_id) {}

  long vehicle_id() const { return vehicle_id_; }

 private:
  long vehicle_id_;
};

// Argument outside the mathematical domain of an operation (e.g. T <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or unsatisfiable configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Training or evaluation produced a non-finite quantity.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Evaluation called on an unusable input (e.g. an empty candidate set).
class EvalError : public Error {
 public:
  using Error::Error;
};

}  // namespace irldrive
