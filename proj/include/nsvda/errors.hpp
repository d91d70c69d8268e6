#pragma once

#include <stdexcept>
#include <string>

namespace nsvda {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands live on different grids or have inconsistent shapes.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameter value. `key` names the config setting when known.
class ParameterError : public Error {
 public:
  explicit ParameterError(const std::string& what) : Error(what) {}
  ParameterError(std::string key, const std::string& message)
      : Error(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// A precondition on inputs of an analysis routine was violated.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared while time stepping.
class BlowUpError : public Error {
 public:
  BlowUpError(double time, const std::string& what)
      : Error(what + " (t = " + std::to_string(time) + ")"), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string key, int line, const std::string& message)
      : Error(format(key, line, message)), key_(std::move(key)), line_(line) {}
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& key, int line, const std::string& message) {
    std::string out;
    if (line > 0) out += "line " + std::to_string(line) + ": ";
    if (!key.empty()) out += key + ": ";
    return out + message;
  }
  std::string key_;
  int line_;
};

/// Checkpoint files with bad magic, version or length.
class FormatError : public Error {
 public:
  using Error::Error;
};

class NoPlateauError : public Error {
 public:
  using Error::Error;
};

}  // namespace nsvda
