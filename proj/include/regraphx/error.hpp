#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace regraphx {

/// Base of every error the simulator raises. A phase tag ("partition",
/// "map", ...) is attached by the orchestration layer; the innermost tag wins.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg), msg_(msg), full_(msg) {}

  const char* what() const noexcept override { return full_.c_str(); }
  const std::string& message() const noexcept { return msg_; }
  const std::string& phase() const noexcept { return phase_; }

  void tag_phase(const std::string& phase) {
    if (!phase_.empty()) return;
    phase_ = phase;
    full_ = "[" + phase_ + "] " + msg_;
  }

 private:
  std::string msg_;
  std::string phase_;
  std::string full_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed input text; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Hardware cannot hold the requested workload.
class CapacityError : public Error {
 public:
  using Error::Error;
};

}  // namespace regraphx
