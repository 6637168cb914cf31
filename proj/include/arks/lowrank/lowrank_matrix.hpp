#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "arks/errors.hpp"
#include "arks/linalg/dense.hpp"
#include "arks/linalg/qr.hpp"
#include "arks/linalg/svd.hpp"

namespace arks {

// F = U S Vᵀ with orthonormal U (N1×r) and V (N2×r').
struct LowRankMatrix {
  DenseMatrix U;
  DenseMatrix S;
  DenseMatrix V;

  static LowRankMatrix zero(std::size_t n1, std::size_t n2) {
    return {DenseMatrix(n1, 0), DenseMatrix(0, 0), DenseMatrix(n2, 0)};
  }

  std::size_t rows() const { return U.rows(); }
  std::size_t cols() const { return V.rows(); }
  std::size_t rank() const { return std::min(S.rows(), S.cols()); }

  // Valid because U and V have orthonormal columns.
  double frobenius_norm() const { return arks::frobenius_norm(S); }

  void validate() const {
    if (U.cols() != S.rows() || V.cols() != S.cols()) throw Error("LowRankMatrix: factor shapes disagree");
  }
};

// Orthonormalizes arbitrary factors U C Vᵀ and drops singular values with
// σ_j ≤ eps_rel·‖C‖ (relative to the Frobenius norm of the core).
inline LowRankMatrix compress(const DenseMatrix& U, const DenseMatrix& C, const DenseMatrix& V, double eps_rel) {
  if (U.cols() != C.rows() || V.cols() != C.cols()) throw Error("compress: factor shapes disagree");
  const std::size_t n1 = U.rows(), n2 = V.rows();
  if (C.size() == 0) return LowRankMatrix::zero(n1, n2);
  const auto qu = reduced_qr(U);
  const auto qv = reduced_qr(V);
  const DenseMatrix core = matmul_nt(matmul(qu.R, C), qv.R);
  const auto svd = dense_svd(core);
  double total = 0.0;
  for (double s : svd.sigma) total += s * s;
  total = std::sqrt(total);
  std::size_t r = 0;
  while (r < svd.sigma.size() && svd.sigma[r] > eps_rel * total && svd.sigma[r] > 0.0) ++r;
  LowRankMatrix out;
  out.U = matmul(qu.Q, svd.U.cols_range(0, r));
  out.V = matmul(qv.Q, svd.V.cols_range(0, r));
  out.S = DenseMatrix(r, r);
  for (std::size_t j = 0; j < r; ++j) out.S(j, j) = svd.sigma[j];
  return out;
}

// a·X + b·Y, recompressed.
inline LowRankMatrix lowrank_add(double a, const LowRankMatrix& X, double b, const LowRankMatrix& Y, double eps_rel) {
  const DenseMatrix Us[2] = {X.U, Y.U};
  const DenseMatrix Vs[2] = {X.V, Y.V};
  const DenseMatrix Cs[2] = {a * X.S, b * Y.S};
  return compress(hcat(Us), block_diag(Cs), hcat(Vs), eps_rel);
}

// Σ_ij F_ij = (1ᵀU) S (Vᵀ1).
inline double entry_sum(const LowRankMatrix& F) {
  std::vector<double> u(F.U.cols(), 0.0), v(F.V.cols(), 0.0);
  for (std::size_t j = 0; j < F.U.cols(); ++j)
    for (std::size_t i = 0; i < F.U.rows(); ++i) u[j] += F.U(i, j);
  for (std::size_t j = 0; j < F.V.cols(); ++j)
    for (std::size_t i = 0; i < F.V.rows(); ++i) v[j] += F.V(i, j);
  double s = 0.0;
  for (std::size_t j = 0; j < F.S.cols(); ++j)
    for (std::size_t i = 0; i < F.S.rows(); ++i) s += u[i] * F.S(i, j) * v[j];
  return s;
}

}  // namespace arks
