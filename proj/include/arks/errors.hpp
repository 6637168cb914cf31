#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace arks {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A banded or dense factorization met a pivot below its threshold.
struct SingularOperatorError : Error {
  using Error::Error;
};

// An iterative kernel ran out of iterations.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), residual_history(std::move(history)) {}

  std::vector<double> residual_history;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace arks
