#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mpsbell {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
  using Error::Error;
};

class NotHermitian : public Error {
public:
  using Error::Error;
};

class EigensolverFailure : public Error {
public:
  using Error::Error;
};

class InvalidModel : public Error {
public:
  using Error::Error;
};

/// The dominant transfer-matrix eigenvalue is not a simple semisimple cluster,
/// so the thermodynamic limit is ill-defined. Callers fall back to a finite ring.
class DegenerateTransferSpectrum : public Error {
public:
  using Error::Error;
};

class InvalidState : public Error {
public:
  using Error::Error;
};

class OptimizerFailure : public Error {
public:
  using Error::Error;
};

class UnsupportedFamily : public Error {
public:
  using Error::Error;
};

class GridError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string &what)
      : Error(what), offset_(offset), expected_(std::move(expected)) {}

  [[nodiscard]] std::size_t offset() const { return offset_; }
  [[nodiscard]] const std::vector<std::string> &expected() const { return expected_; }

private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class EvalError : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  ConfigError(std::size_t line, const std::string &what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  /// 1-based; 0 when the problem is not tied to a line.
  [[nodiscard]] std::size_t line() const { return line_; }

private:
  std::size_t line_;
};

} // namespace mpsbell
