#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <sstream>
#include <vector>

#include "arks/errors.hpp"
#include "arks/linalg/dense.hpp"
#include "arks/solver/reduced_system.hpp"

namespace arks {

struct GmresResult {
  DenseMatrix x;
  std::size_t iterations = 0;
  std::vector<double> history;  // preconditioned relative residual, starting at 1
  bool converged = false;
};

using MatrixMap = std::function<DenseMatrix(const DenseMatrix&)>;

// Full left-preconditioned GMRES with modified Gram-Schmidt Arnoldi and
// Givens rotations, zero initial guess. Iterates on matrices shaped like b.
inline GmresResult gmres(const MatrixMap& A, const MatrixMap& M_inv, const DenseMatrix& b, double tol,
                         std::size_t max_iter) {
  GmresResult out;
  out.x = DenseMatrix(b.rows(), b.cols());
  DenseMatrix z = M_inv(b);
  const double beta = frobenius_norm(z);
  out.history.push_back(beta > 0.0 ? 1.0 : 0.0);
  if (beta == 0.0) {
    out.converged = true;
    return out;
  }
  std::vector<DenseMatrix> V;
  V.push_back((1.0 / beta) * z);
  std::vector<std::vector<double>> H;  // column j has j+2 entries
  std::vector<double> cs, sn, g{beta};

  std::size_t j = 0;
  for (; j < max_iter; ++j) {
    DenseMatrix w = M_inv(A(V[j]));
    std::vector<double> h(j + 2, 0.0);
    for (std::size_t i = 0; i <= j; ++i) {
      h[i] = inner(w, V[i]);
      w.axpy(-h[i], V[i]);
    }
    h[j + 1] = frobenius_norm(w);
    for (std::size_t i = 0; i < j; ++i) {
      const double t = cs[i] * h[i] + sn[i] * h[i + 1];
      h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
      h[i] = t;
    }
    const double r = std::hypot(h[j], h[j + 1]);
    const double c = r == 0.0 ? 1.0 : h[j] / r;
    const double s = r == 0.0 ? 0.0 : h[j + 1] / r;
    cs.push_back(c);
    sn.push_back(s);
    const double hj1 = h[j + 1];
    h[j] = r;
    h[j + 1] = 0.0;
    g.push_back(-s * g[j]);
    g[j] = c * g[j];
    H.push_back(std::move(h));
    const double rel = std::abs(g[j + 1]) / beta;
    out.history.push_back(rel);
    const bool breakdown = hj1 <= 1e-14 * r;
    if (rel <= tol || breakdown) {
      out.converged = true;
      ++j;
      break;
    }
    V.push_back((1.0 / hj1) * w);
  }
  out.iterations = j;
  // Back substitution for the least-squares coefficients.
  std::vector<double> y(j, 0.0);
  for (std::size_t i = j; i-- > 0;) {
    double s = g[i];
    for (std::size_t k = i + 1; k < j; ++k) s -= H[k][i] * y[k];
    y[i] = s / H[i][i];
  }
  for (std::size_t i = 0; i < j; ++i) out.x.axpy(y[i], V[i]);
  return out;
}

// Solves the reduced system; throws when the iteration cap is reached.
inline GmresResult gmres_solve(const ReducedSystem& sys, double tol, std::size_t max_iter, bool precondition = true) {
  const MatrixMap A = [&sys](const DenseMatrix& S) { return reduced_apply(sys, S); };
  const MatrixMap M = precondition ? MatrixMap([&sys](const DenseMatrix& Z) { return acs_precondition(sys, Z); })
                                   : MatrixMap([](const DenseMatrix& Z) { return Z; });
  GmresResult res = gmres(A, M, sys.B, tol, max_iter);
  if (!res.converged) {
    std::ostringstream os;
    os << "gmres_solve: no convergence in " << max_iter << " iterations (residual " << res.history.back() << ")";
    throw ConvergenceError(os.str(), res.history);
  }
  return res;
}

}  // namespace arks
