#pragma once

#include <cstddef>
#include <sstream>

#include "arks/errors.hpp"

namespace arks {

struct Tolerances {
  double eps_tol = 1e-4;     // relative residual accepted by the outer loop
  double eps_kappa = 1e-3;   // absolute basis truncation threshold
  double eps = 1e-8;         // relative singular value truncation threshold
  double eps_gmres = 1e-8;   // preconditioned relative residual of the inner solve
  std::size_t max_iter = 20;
  std::size_t gmres_max_iter = 500;

  void validate() const {
    std::ostringstream os;
    if (!(eps_tol > 0.0)) os << "eps_tol must be positive; ";
    if (!(eps_kappa >= 0.0)) os << "eps_kappa must be non-negative; ";
    if (!(eps >= 0.0)) os << "eps must be non-negative; ";
    if (!(eps_gmres > 0.0)) os << "eps_gmres must be positive; ";
    if (!(eps_gmres < 1e-2 * eps_tol)) os << "eps_gmres must be below 1e-2*eps_tol; ";
    if (!(eps < 1e-2 * eps_tol)) os << "eps must be below 1e-2*eps_tol; ";
    if (max_iter == 0) os << "max_iter must be positive; ";
    if (gmres_max_iter == 0) os << "gmres_max_iter must be positive; ";
    if (!os.str().empty()) throw ConfigError("invalid tolerances: " + os.str());
  }
};

}  // namespace arks
