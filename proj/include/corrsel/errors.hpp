#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace corrsel {

// Failure classes. The CLI maps each family onto a distinct exit code.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or unusable input data (exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

// A numerical routine could not produce a result (exit code 4).
class ComputationError : public Error {
public:
    using Error::Error;
};

// Bad configuration or command-line usage (exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public DataError {
public:
    using DataError::DataError;
};

class MissingColumn : public DataError {
public:
    explicit MissingColumn(const std::string& column)
        : DataError("missing column '" + column + "'"), column_(column) {}
    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

class NonNumericCell : public DataError {
public:
    // row is 1-based over data lines (header excluded), col is 0-based.
    NonNumericCell(std::size_t row, std::size_t col, const std::string& column)
        : DataError("non-numeric cell at data row " + std::to_string(row) + ", column " +
                    std::to_string(col) + " ('" + column + "')"),
          row_(row), col_(col) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t col() const noexcept { return col_; }

private:
    std::size_t row_;
    std::size_t col_;
};

class InvalidOutcomeValue : public DataError {
public:
    InvalidOutcomeValue(std::size_t row, const std::string& value)
        : DataError("invalid outcome value '" + value + "' at data row " + std::to_string(row) +
                    " (expected 0/1 or clean/defective)"),
          row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class EmptyDataset : public DataError {
public:
    using DataError::DataError;
};

// Structural invariant violation when constructing a Dataset directly.
class InvalidDataset : public DataError {
public:
    using DataError::DataError;
};

class DegenerateOutcome : public DataError {
public:
    using DataError::DataError;
};

class InvalidSpec : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class UnsupportedSelector : public ConfigError {
public:
    using ConfigError::ConfigError;
};

class EmptyTestSet : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class LengthMismatch : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class DimensionMismatch : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class TooFewValues : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class SingleClass : public ComputationError {
public:
    using ComputationError::ComputationError;
};

}  // namespace corrsel
