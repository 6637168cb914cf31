#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "arks/errors.hpp"
#include "arks/linalg/dense.hpp"
#include "arks/linalg/qr.hpp"
#include "arks/linalg/svd.hpp"
#include "arks/lowrank/lowrank_matrix.hpp"

namespace arks {

// Orthonormal basis of the concatenated blocks, dropping directions whose
// singular value in the triangular factor is at most eps_kappa (absolute).
inline DenseMatrix svd_truncated_qr(std::span<const DenseMatrix> blocks, double eps_kappa) {
  if (blocks.empty()) throw Error("svd_truncated_qr: no input blocks");
  const DenseMatrix M = hcat(blocks);
  if (M.cols() == 0) return DenseMatrix(M.rows(), 0);
  const auto [Q, R] = compact_qr(M);
  if (R.rows() == 0) return DenseMatrix(M.rows(), 0);
  const auto svd = dense_svd(R);
  std::size_t r = 0;
  while (r < svd.sigma.size() && svd.sigma[r] > eps_kappa) ++r;
  return matmul(Q, svd.U.cols_range(0, r));
}

inline DenseMatrix svd_truncated_qr(const std::vector<DenseMatrix>& blocks, double eps_kappa) {
  return svd_truncated_qr(std::span<const DenseMatrix>(blocks), eps_kappa);
}

struct TruncationResult {
  LowRankMatrix F;
  DenseMatrix T1;  // left transform, columns kept
  DenseMatrix T2;  // right transform, columns kept
};

// SVD of the core S = W Σ Zᵀ, keeping σ_j / ‖S‖_F > eps.
inline TruncationResult truncated_svd(const LowRankMatrix& F, double eps) {
  F.validate();
  TruncationResult out;
  const auto svd = dense_svd(F.S);
  const double norm = frobenius_norm(F.S);
  std::size_t r = 0;
  if (norm > 0.0)
    while (r < svd.sigma.size() && svd.sigma[r] / norm > eps) ++r;
  out.T1 = svd.U.cols_range(0, r);
  out.T2 = svd.V.cols_range(0, r);
  out.F.U = matmul(F.U, out.T1);
  out.F.V = matmul(F.V, out.T2);
  out.F.S = DenseMatrix(r, r);
  for (std::size_t j = 0; j < r; ++j) out.F.S(j, j) = svd.sigma[j];
  return out;
}

}  // namespace arks
