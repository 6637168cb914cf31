#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "arks/errors.hpp"
#include "arks/grid.hpp"

namespace arks {

// Scalar function of one variable with optional first and second derivatives.
struct Func1D {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;

  double operator()(double x) const { return f(x); }
  double d(double x) const {
    if (!df) throw Error("Func1D: derivative not available");
    return df(x);
  }
  double d2(double x) const {
    if (!d2f) throw Error("Func1D: second derivative not available");
    return d2f(x);
  }

  static Func1D constant(double c) {
    return {[c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
  }
};

// Samples of a coefficient factor at the nodes (n) and faces (n+1) of a grid.
struct SeparableFactor {
  std::vector<double> nodes;
  std::vector<double> faces;

  static SeparableFactor sample(const Grid1D& g, const Func1D& fn) {
    SeparableFactor s;
    s.nodes.resize(g.n);
    s.faces.resize(g.n + 1);
    for (std::size_t i = 0; i < g.n; ++i) s.nodes[i] = fn(g.node(i));
    for (std::size_t k = 0; k <= g.n; ++k) s.faces[k] = fn(g.face(k));
    return s;
  }

  void validate(std::size_t n) const {
    if (nodes.size() != n || faces.size() != n + 1) throw Error("SeparableFactor: wrong sample counts");
    for (double v : nodes)
      if (!std::isfinite(v)) throw Error("SeparableFactor: non-finite node sample");
    for (double v : faces)
      if (!std::isfinite(v)) throw Error("SeparableFactor: non-finite face sample");
  }
};

// One separable term c(x, y) = x(x) * y(y).
struct SeparablePair {
  Func1D x;
  Func1D y;
};

// Diffusion φ^x = Σ_i φ1x_i(x) φ2x_i(y), φ^y = Σ_j φ1y_j(x) φ2y_j(y);
// advection σ^x = Σ_k σ1x_k(x) σ2x_k(y), σ^y = Σ_l σ1y_l(x) σ2y_l(y).
struct CoefficientSet {
  std::vector<SeparablePair> diffusion_x;
  std::vector<SeparablePair> diffusion_y;
  std::vector<SeparablePair> advection_x;
  std::vector<SeparablePair> advection_y;

  std::size_t r_ranks() const {
    return diffusion_x.size() + diffusion_y.size() + advection_x.size() + advection_y.size();
  }

  void validate() const {
    if (r_ranks() == 0) throw ConfigError("CoefficientSet: all ranks are zero");
  }
};

namespace detail {

// max over the tensor grid of |Σ_t a_t(x_i) b_t(y_j)|.
inline double tensor_max_abs(const std::vector<SeparablePair>& terms, const Grid1D& gx, const Grid1D& gy) {
  if (terms.empty()) return 0.0;
  std::vector<std::vector<double>> a(terms.size()), b(terms.size());
  for (std::size_t t = 0; t < terms.size(); ++t) {
    a[t] = SeparableFactor::sample(gx, terms[t].x).nodes;
    b[t] = SeparableFactor::sample(gy, terms[t].y).nodes;
  }
  double m = 0.0;
  if (terms.size() == 1) {
    double ma = 0.0, mb = 0.0;
    for (double v : a[0]) ma = std::max(ma, std::abs(v));
    for (double v : b[0]) mb = std::max(mb, std::abs(v));
    return ma * mb;
  }
  std::vector<double> col(gx.n);
  for (std::size_t j = 0; j < gy.n; ++j) {
    std::fill(col.begin(), col.end(), 0.0);
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const double bj = b[t][j];
      const double* at = a[t].data();
      for (std::size_t i = 0; i < gx.n; ++i) col[i] += at[i] * bj;
    }
    for (double v : col) m = std::max(m, std::abs(v));
  }
  return m;
}

}  // namespace detail

struct CoefficientMaxima {
  double phi_max = 0.0;
  double sigma_max = 0.0;
};

// Maxima of the diffusion and advection coefficients over the interior nodes.
inline CoefficientMaxima coefficient_maxima(const CoefficientSet& c, const Grid1D& gx, const Grid1D& gy) {
  CoefficientMaxima m;
  m.phi_max = std::max(detail::tensor_max_abs(c.diffusion_x, gx, gy), detail::tensor_max_abs(c.diffusion_y, gx, gy));
  m.sigma_max =
      std::max(detail::tensor_max_abs(c.advection_x, gx, gy), detail::tensor_max_abs(c.advection_y, gx, gy));
  return m;
}

}  // namespace arks
