#pragma once

#include <stdexcept>
#include <string>

namespace agrl {

// Error taxonomy mirrors the CLI exit codes: ConfigError -> 1,
// NumericError -> 2, IoError -> 3. ShapeError is a config-level problem
// (mismatched nets/checkpoints/goal sets).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct ShapeError : ConfigError {
  explicit ShapeError(const std::string& msg) : ConfigError(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace agrl
