#pragma once

#include <stdexcept>
#include <string>

namespace contam {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad flags, inadmissible parameters, malformed config files.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Dataset files that cannot be ingested. Messages carry path and line number.
class DataError : public Error {
 public:
  using Error::Error;
};

// Unreadable, truncated or version-mismatched model files.
class ModelFormatError : public Error {
 public:
  using Error::Error;
};

// Base for every failure reported by a log-probability oracle.
class OracleError : public Error {
 public:
  OracleError(std::string oracle_name, const std::string& what)
      : Error(oracle_name + ": " + what), oracle_name_(std::move(oracle_name)) {}

  const std::string& oracle_name() const { return oracle_name_; }

 private:
  std::string oracle_name_;
};

// Connection-level failure (crash, closed stream, timeout, garbled framing).
// Retrying on a fresh connection may succeed.
class TransportError : public OracleError {
 public:
  using OracleError::OracleError;
};

// The oracle understood the request and refused it. Retrying will not help.
class SemanticError : public OracleError {
 public:
  using OracleError::OracleError;
};

}  // namespace contam
