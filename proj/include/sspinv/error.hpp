#pragma once

#include <stdexcept>
#include <string>

namespace sspinv {

// Exit codes used by the command line front end.
enum class ExitCode : int { ok = 0, failure = 1, config = 2, data = 3 };

// Bad parameters or configuration (k < 1, retain order too large, ...).
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Input data violates a contract (invalid profile, empty set, NaN in a file).
class DataError : public std::runtime_error {
public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

class InvalidProfileError : public DataError {
public:
  explicit InvalidProfileError(const std::string& what) : DataError("invalid profile: " + what) {}
};

class DomainError : public DataError {
public:
  explicit DomainError(const std::string& what) : DataError(what) {}
};

class ShapeError : public DataError {
public:
  explicit ShapeError(const std::string& what) : DataError("shape mismatch: " + what) {}
};

class DepthCoverageError : public DataError {
public:
  explicit DepthCoverageError(const std::string& what) : DataError(what) {}
};

// A ray refracts back before reaching the receiver.
class RayTurnsError : public DataError {
public:
  RayTurnsError(double depth, const std::string& what) : DataError(what), depth_(depth) {}
  double depth() const noexcept { return depth_; }

private:
  double depth_;
};

class NoDirectPathError : public DataError {
public:
  explicit NoDirectPathError(const std::string& what) : DataError(what) {}
};

}  // namespace sspinv
