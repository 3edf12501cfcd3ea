#pragma once

#include <stdexcept>
#include <string>

namespace hvacsr {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind { Config = 2, Data = 3, Solver = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error(ErrorKind::Config, message) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& message) : Error(ErrorKind::Data, message) {}
};

class SolverError : public Error {
 public:
  explicit SolverError(const std::string& message) : Error(ErrorKind::Solver, message) {}
};

const char* error_kind_name(ErrorKind kind) noexcept;

}  // namespace hvacsr
