#pragma once

#include <stdexcept>
#include <string>

namespace matchlab {

// Bad parameters, malformed input files, incompatible configurations.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Series that fail to converge, fixed-point iterations that hit their cap,
// ODE step-halving disagreement.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace matchlab
