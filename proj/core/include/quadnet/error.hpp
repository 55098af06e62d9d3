#pragma once

#include <stdexcept>

namespace quadnet {

// Unreadable, malformed, or inconsistent input data. CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite or degenerate numeric state. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace quadnet
