#pragma once

#include <stdexcept>
#include <string>

namespace skf {

// Error families map onto the tool's exit codes: ConfigError -> 1,
// DataError -> 2, NumericalError -> 3. Anything else is treated as
// a numerical/internal failure.

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace skf
