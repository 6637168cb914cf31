#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <vector>

#include "arks/coefficients.hpp"
#include "arks/diagnostics.hpp"
#include "arks/errors.hpp"
#include "arks/grid.hpp"
#include "arks/linalg/dense.hpp"
#include "arks/linalg/tridiagonal.hpp"

namespace arks {

// Conservative second difference (φ f')' with face coefficients.
inline TridiagonalMatrix build_diffusion_operator(const Grid1D& g, const SeparableFactor& phi) {
  phi.validate(g.n);
  const double h2 = g.dx * g.dx;
  TridiagonalMatrix t(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    t.diag[i] = -(phi.faces[i] + phi.faces[i + 1]) / h2;
    if (i > 0) t.sub[i - 1] = phi.faces[i] / h2;
    if (i + 1 < g.n) t.super[i] = phi.faces[i + 1] / h2;
  }
  return t;
}

// Centered flux difference (σ f)' with face coefficients and face values
// averaged from the neighbouring nodes.
inline TridiagonalMatrix build_advection_operator(const Grid1D& g, const SeparableFactor& sigma) {
  sigma.validate(g.n);
  const double h = 2.0 * g.dx;
  TridiagonalMatrix t(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    t.diag[i] = (sigma.faces[i + 1] - sigma.faces[i]) / h;
    if (i > 0) t.sub[i - 1] = -sigma.faces[i] / h;
    if (i + 1 < g.n) t.super[i] = sigma.faces[i + 1] / h;
  }
  return t;
}

// One-dimensional factor of a term: either banded or diagonal.
struct Op1D {
  const TridiagonalMatrix* tri = nullptr;
  const std::vector<double>* diag = nullptr;

  DenseMatrix apply(const DenseMatrix& X) const {
    if (tri) return tri->apply(X);
    return scale_rows(*diag, X);
  }
};

// A term of 𝓛(F) = Σ left · F · rightᵀ.
struct OperatorTerm {
  Op1D left;
  Op1D right;
};

struct OperatorSet {
  Grid1D gx, gy;
  double dt_diag = 0.0;
  std::size_t r_ranks = 0;

  std::vector<TridiagonalMatrix> T1, T3;         // x-direction, sizes N1
  std::vector<TridiagonalMatrix> T2, T4;         // y-direction, sizes N2
  std::vector<std::vector<double>> Phi1, Sigma1;  // node samples on x (from y-terms)
  std::vector<std::vector<double>> Phi2, Sigma2;  // node samples on y (from x-terms)
  std::vector<double> alpha_x, alpha_y, gamma_x, gamma_y;

  TridiagonalMatrix P1, P2;
  std::vector<TriLU> A1, A2, A3, A4;
  std::optional<TriLU> P1lu, P2lu;  // absent when a side has no banded terms

  std::size_t n1() const { return gx.n; }
  std::size_t n2() const { return gy.n; }
  bool has_x_terms() const { return !T1.empty() || !T3.empty(); }
  bool has_y_terms() const { return !T2.empty() || !T4.empty(); }

  // Terms in the order T1⊗Φ2, Φ1⊗T2, T3⊗Σ2, Σ1⊗T4.
  std::vector<OperatorTerm> terms() const {
    std::vector<OperatorTerm> out;
    out.reserve(r_ranks);
    for (std::size_t i = 0; i < T1.size(); ++i) out.push_back({{&T1[i], nullptr}, {nullptr, &Phi2[i]}});
    for (std::size_t j = 0; j < T2.size(); ++j) out.push_back({{nullptr, &Phi1[j]}, {&T2[j], nullptr}});
    for (std::size_t k = 0; k < T3.size(); ++k) out.push_back({{&T3[k], nullptr}, {nullptr, &Sigma2[k]}});
    for (std::size_t l = 0; l < T4.size(); ++l) out.push_back({{nullptr, &Sigma1[l]}, {&T4[l], nullptr}});
    return out;
  }
};

namespace detail {

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline TridiagonalMatrix averaged_block(std::size_t n, double r_ranks, double dt, double avg,
                                        const TridiagonalMatrix& T) {
  TridiagonalMatrix A = TridiagonalMatrix::identity(n, 1.0 / r_ranks);
  A.axpy(-dt * avg, T);
  return A;
}

}  // namespace detail

inline OperatorSet assemble_operator_set(const Grid1D& gx, const Grid1D& gy, const CoefficientSet& coeffs,
                                         double dt_diag) {
  coeffs.validate();
  if (!(dt_diag > 0.0) || !std::isfinite(dt_diag)) throw ConfigError("assemble_operator_set: dt_diag must be positive");
  OperatorSet ops;
  ops.gx = gx;
  ops.gy = gy;
  ops.dt_diag = dt_diag;
  ops.r_ranks = coeffs.r_ranks();
  const double R = static_cast<double>(ops.r_ranks);

  for (const auto& t : coeffs.diffusion_x) {
    ops.T1.push_back(build_diffusion_operator(gx, SeparableFactor::sample(gx, t.x)));
    ops.Phi2.push_back(SeparableFactor::sample(gy, t.y).nodes);
  }
  for (const auto& t : coeffs.diffusion_y) {
    ops.T2.push_back(build_diffusion_operator(gy, SeparableFactor::sample(gy, t.y)));
    ops.Phi1.push_back(SeparableFactor::sample(gx, t.x).nodes);
  }
  for (const auto& t : coeffs.advection_x) {
    ops.T3.push_back(build_advection_operator(gx, SeparableFactor::sample(gx, t.x)).scaled(-1.0));
    ops.Sigma2.push_back(SeparableFactor::sample(gy, t.y).nodes);
  }
  for (const auto& t : coeffs.advection_y) {
    ops.T4.push_back(build_advection_operator(gy, SeparableFactor::sample(gy, t.y)).scaled(-1.0));
    ops.Sigma1.push_back(SeparableFactor::sample(gx, t.x).nodes);
  }
  for (const auto& v : ops.Phi2) ops.alpha_x.push_back(detail::mean(v));
  for (const auto& v : ops.Phi1) ops.alpha_y.push_back(detail::mean(v));
  for (const auto& v : ops.Sigma2) ops.gamma_x.push_back(detail::mean(v));
  for (const auto& v : ops.Sigma1) ops.gamma_y.push_back(detail::mean(v));

  ops.P1 = TridiagonalMatrix(gx.n);
  ops.P2 = TridiagonalMatrix(gy.n);
  auto add_block = [&](std::vector<TriLU>& lus, TridiagonalMatrix& P, std::size_t n, double avg,
                       const TridiagonalMatrix& T, const char* name, std::size_t idx) {
    const TridiagonalMatrix A = detail::averaged_block(n, R, dt_diag, avg, T);
    P += A;
    try {
      lus.emplace_back(A);
    } catch (const SingularOperatorError& e) {
      std::ostringstream os;
      os << "assemble_operator_set: block " << name << "[" << idx << "] is singular (time step too large?): "
         << e.what();
      throw SingularOperatorError(os.str());
    }
  };
  for (std::size_t i = 0; i < ops.T1.size(); ++i) add_block(ops.A1, ops.P1, gx.n, ops.alpha_x[i], ops.T1[i], "A1", i);
  for (std::size_t k = 0; k < ops.T3.size(); ++k) add_block(ops.A3, ops.P1, gx.n, ops.gamma_x[k], ops.T3[k], "A3", k);
  for (std::size_t j = 0; j < ops.T2.size(); ++j) add_block(ops.A2, ops.P2, gy.n, ops.alpha_y[j], ops.T2[j], "A2", j);
  for (std::size_t l = 0; l < ops.T4.size(); ++l) add_block(ops.A4, ops.P2, gy.n, ops.gamma_y[l], ops.T4[l], "A4", l);
  try {
    if (ops.has_x_terms()) ops.P1lu.emplace(ops.P1);
    if (ops.has_y_terms()) ops.P2lu.emplace(ops.P2);
  } catch (const SingularOperatorError& e) {
    throw SingularOperatorError(std::string("assemble_operator_set: averaged operator P is singular: ") + e.what());
  }
  return ops;
}

// Re_c = σ_max Δx / φ_max; warns when the centered scheme loses monotonicity.
inline double cell_reynolds_number(double sigma_max, double phi_max, double dx) {
  if (sigma_max == 0.0) return 0.0;
  if (!(phi_max > 0.0)) {
    diagnostics::warn("cell Reynolds number is infinite: advection without diffusion");
    return std::numeric_limits<double>::infinity();
  }
  const double re = sigma_max * dx / phi_max;
  if (re >= 2.0) {
    std::ostringstream os;
    os << "cell Reynolds number " << re << " >= 2; centered advection may oscillate";
    diagnostics::warn(os.str());
  }
  return re;
}

inline double cell_reynolds_check(const CoefficientSet& coeffs, const Grid1D& grid) {
  const auto m = coefficient_maxima(coeffs, grid, grid);
  return cell_reynolds_number(m.sigma_max, m.phi_max, grid.dx);
}

}  // namespace arks
