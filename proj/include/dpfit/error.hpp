#pragma once

#include <stdexcept>
#include <string>

namespace dpfit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

// Histogram file errors carry the offending location (1-based; 0 when not
// applicable) so callers can point at the bad cell.
class HistogramFileError : public Error {
 public:
  HistogramFileError(const std::string& what, int row, int column)
      : Error(what), row_(row), column_(column) {}
  int row() const { return row_; }
  int column() const { return column_; }

 private:
  int row_;
  int column_;
};

class MalformedRowError : public HistogramFileError {
 public:
  using HistogramFileError::HistogramFileError;
};

class NegativeCountError : public HistogramFileError {
 public:
  using HistogramFileError::HistogramFileError;
};

class ShapeMismatchError : public HistogramFileError {
 public:
  using HistogramFileError::HistogramFileError;
};

}  // namespace dpfit
