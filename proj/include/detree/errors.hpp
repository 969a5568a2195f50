#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace detree {

/// Coarse error classes; each maps to one CLI exit code.
enum class ErrorCategory { Usage, Data, Config, Numeric };

std::string_view category_name(ErrorCategory c) noexcept;
int exit_code(ErrorCategory c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, std::string kind, const std::string& message)
      : std::runtime_error(message), category_(category), kind_(std::move(kind)) {}

  ErrorCategory category() const noexcept { return category_; }
  /// Short machine-readable tag, e.g. "missing-column".
  const std::string& kind() const noexcept { return kind_; }

 private:
  ErrorCategory category_;
  std::string kind_;
};

// Input data problems (CSV and model files).
class DataError : public Error {
 public:
  DataError(std::string kind, const std::string& message)
      : Error(ErrorCategory::Data, std::move(kind), message) {}
};

class MissingColumnError : public DataError {
 public:
  explicit MissingColumnError(const std::string& column)
      : DataError("missing-column", "column '" + column + "' not found"), column_(column) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

class NonNumericError : public DataError {
 public:
  NonNumericError(std::size_t row, const std::string& column, const std::string& cell)
      : DataError("non-numeric", "row " + std::to_string(row) + ", column '" + column +
                                     "': value '" + cell + "' is not a finite number"),
        row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

class EmptyInputError : public DataError {
 public:
  explicit EmptyInputError(const std::string& message) : DataError("empty-input", message) {}
};

class ModelParseError : public DataError {
 public:
  explicit ModelParseError(const std::string& message) : DataError("model-parse", message) {}
};

class ModelSchemaError : public DataError {
 public:
  explicit ModelSchemaError(const std::string& message) : DataError("model-schema", message) {}
};

class ModelInvariantError : public DataError {
 public:
  explicit ModelInvariantError(const std::string& message)
      : DataError("model-invariant", message) {}
};

// Caller handed in something inconsistent (shapes, parameters, options).
class ConfigError : public Error {
 public:
  ConfigError(std::string kind, const std::string& message)
      : Error(ErrorCategory::Config, std::move(kind), message) {}
  explicit ConfigError(const std::string& message) : ConfigError("invalid-config", message) {}
};

class DimensionError : public ConfigError {
 public:
  DimensionError(std::size_t expected, std::size_t got)
      : ConfigError("dimension-mismatch", "expected " + std::to_string(expected) +
                                              " coordinates, got " + std::to_string(got)) {}
};

class NumericError : public Error {
 public:
  NumericError(std::string kind, const std::string& message)
      : Error(ErrorCategory::Numeric, std::move(kind), message) {}
};

class GeometryError : public NumericError {
 public:
  using NumericError::NumericError;
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& message) : Error(ErrorCategory::Usage, "usage", message) {}
};

}  // namespace detree
