#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

#include "arks/errors.hpp"
#include "arks/linalg/dense.hpp"
#include "arks/linalg/qr.hpp"
#include "arks/lowrank/lowrank_matrix.hpp"
#include "arks/operators.hpp"

namespace arks {

struct ResidualFactors {
  DenseMatrix R_U;
  DenseMatrix R_V;
};

// Triangular factors of [U | T1 U … | Φ1 U … | T3 U … | Σ1 U …] and
// [V | Φ2 V … | T2 V … | Σ2 V … | T4 V …]; block k on the left pairs with
// block k on the right.
inline ResidualFactors residual_factors(const DenseMatrix& U, const DenseMatrix& V, const OperatorSet& ops) {
  const auto terms = ops.terms();
  std::vector<DenseMatrix> left{U}, right{V};
  left.reserve(terms.size() + 1);
  right.reserve(terms.size() + 1);
  for (const auto& t : terms) {
    left.push_back(t.left.apply(U));
    right.push_back(t.right.apply(V));
  }
  assert(left.size() == right.size() && left.size() == ops.r_ranks + 1);
  if (left.size() != right.size()) throw Error("residual_factors: block count mismatch");
  return {compact_qr(hcat(left)).R, compact_qr(hcat(right)).R};
}

// ‖F1 − dt·𝓛(F1) − U1 B̃ V1ᵀ‖_F evaluated through the triangular factors, with
// middle factor blockdiag(S1 − B̃, −dt S1, …, −dt S1).
inline double lowrank_residual_norm(const LowRankMatrix& F1, const DenseMatrix& B_tilde, const OperatorSet& ops,
                                    double dt_diag) {
  F1.validate();
  if (B_tilde.rows() != F1.S.rows() || B_tilde.cols() != F1.S.cols())
    throw Error("lowrank_residual_norm: B̃ does not match the core of F1");
  if (F1.S.size() == 0) return 0.0;
  const auto f = residual_factors(F1.U, F1.V, ops);
  std::vector<DenseMatrix> blocks;
  blocks.reserve(ops.r_ranks + 1);
  blocks.push_back(F1.S - B_tilde);
  const DenseMatrix scaled = (-dt_diag) * F1.S;
  for (std::size_t k = 0; k < ops.r_ranks; ++k) blocks.push_back(scaled);
  const DenseMatrix mid = block_diag(blocks);
  return frobenius_norm(matmul_nt(matmul(f.R_U, mid), f.R_V));
}

// ‖F1 − dt·𝓛(F1) − U_B B V_Bᵀ‖_F for a right-hand side given in its own
// factors, which need not share a basis with F1.
inline double lowrank_residual_norm(const LowRankMatrix& F1, const DenseMatrix& U_B, const DenseMatrix& B,
                                    const DenseMatrix& V_B, const OperatorSet& ops, double dt_diag) {
  F1.validate();
  if (U_B.cols() != B.rows() || V_B.cols() != B.cols() || U_B.rows() != F1.rows() || V_B.rows() != F1.cols())
    throw Error("lowrank_residual_norm: right-hand side factors do not match");
  const auto terms = ops.terms();
  std::vector<DenseMatrix> left, right, blocks;
  if (F1.S.size() > 0) {
    left.push_back(F1.U);
    right.push_back(F1.V);
    blocks.push_back(F1.S);
    const DenseMatrix scaled = (-dt_diag) * F1.S;
    for (const auto& t : terms) {
      left.push_back(t.left.apply(F1.U));
      right.push_back(t.right.apply(F1.V));
      blocks.push_back(scaled);
    }
  }
  if (B.size() > 0) {
    left.push_back(U_B);
    right.push_back(V_B);
    blocks.push_back((-1.0) * B);
  }
  if (blocks.empty()) return 0.0;
  const DenseMatrix RU = compact_qr(hcat(left)).R;
  const DenseMatrix RV = compact_qr(hcat(right)).R;
  return frobenius_norm(matmul_nt(matmul(RU, block_diag(blocks)), RV));
}

}  // namespace arks
