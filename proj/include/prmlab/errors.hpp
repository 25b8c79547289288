#pragma once

#include <stdexcept>
#include <string>

namespace prmlab {

// CLI exit-code mapping: ConfigError -> 1, DataError -> 2, DivergenceError -> 3.

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DivergenceError : std::runtime_error {
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace prmlab
