#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "arks/errors.hpp"

namespace arks {

// Uniform grid of interior nodes under homogeneous Dirichlet conditions.
struct Grid1D {
  std::size_t n = 0;
  double xmin = 0.0;
  double xmax = 1.0;
  double dx = 0.0;

  Grid1D() = default;
  Grid1D(std::size_t n_, double xmin_, double xmax_) : n(n_), xmin(xmin_), xmax(xmax_) {
    if (n < 2) throw ConfigError("Grid1D: need at least 2 interior points, got " + std::to_string(n));
    if (!(xmax > xmin)) throw ConfigError("Grid1D: empty domain");
    dx = (xmax - xmin) / static_cast<double>(n + 1);
  }

  // Node i sits at xmin + (i+1) dx, i = 0..n-1.
  double node(std::size_t i) const { return xmin + static_cast<double>(i + 1) * dx; }
  // Face k sits at xmin + (k + 1/2) dx, k = 0..n; node i lies between faces i and i+1.
  double face(std::size_t k) const { return xmin + (static_cast<double>(k) + 0.5) * dx; }

  std::vector<double> nodes() const {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = node(i);
    return x;
  }
};

}  // namespace arks
