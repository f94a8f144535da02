#pragma once

#include <stdexcept>
#include <string>

namespace krf {

// Malformed input data: files, records, labels, configs that refer to
// unknown entities. CLI maps this to exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric failure during computation (non-finite loss, aborted gradient
// check). CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace krf
