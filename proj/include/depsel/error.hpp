#pragma once

#include <stdexcept>
#include <string>

namespace depsel {

/// Bad configuration: missing column, missing file, inconsistent flags.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data (bad CSV row, bad vector file, shape mismatch).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric routine could not produce a meaningful result.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace depsel
