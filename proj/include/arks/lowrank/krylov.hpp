#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "arks/errors.hpp"
#include "arks/linalg/dense.hpp"
#include "arks/linalg/qr.hpp"
#include "arks/linalg/tridiagonal.hpp"
#include "arks/lowrank/truncation.hpp"
#include "arks/operators.hpp"

namespace arks {

// Operator that advances one Krylov chain: a banded product, a banded solve,
// or a diagonal scaling.
struct KrylovOperator {
  const TridiagonalMatrix* tri = nullptr;
  const TriLU* inverse = nullptr;
  const std::vector<double>* diag = nullptr;

  static KrylovOperator multiply(const TridiagonalMatrix& t) { return {&t, nullptr, nullptr}; }
  static KrylovOperator solve(const TriLU& lu) { return {nullptr, &lu, nullptr}; }
  static KrylovOperator scale(const std::vector<double>& d) { return {nullptr, nullptr, &d}; }

  DenseMatrix apply(const DenseMatrix& W) const {
    if (tri) return tri->apply(W);
    if (inverse) return thomas_solve(*inverse, W);
    if (diag) return scale_rows(*diag, W);
    throw Error("KrylovOperator: empty operator");
  }
};

struct KrylovBasis {
  DenseMatrix Q;                    // orthonormal basis
  std::vector<DenseMatrix> chains;  // current power block per operator
  std::size_t iteration = 0;        // augmentations performed
  std::size_t r0 = 0;

  // Column count of κ before any truncation: (l·m + 1)·r0.
  std::size_t pre_truncation_columns() const { return (chains.size() * iteration + 1) * r0; }
  std::size_t size() const { return Q.cols(); }
};

// Chains start at the orthonormal starting block U0.
inline KrylovBasis krylov_start(const DenseMatrix& U0, std::size_t operator_count) {
  KrylovBasis b;
  b.Q = U0;
  b.r0 = U0.cols();
  b.chains.assign(operator_count, U0);
  return b;
}

// Operator list on the x side: P1, P1⁻¹, A1⁻¹, A3⁻¹, Φ1y, Σ1y.
inline std::vector<KrylovOperator> krylov_operators_x(const OperatorSet& ops) {
  std::vector<KrylovOperator> out;
  if (ops.P1lu) {
    out.push_back(KrylovOperator::multiply(ops.P1));
    out.push_back(KrylovOperator::solve(*ops.P1lu));
  }
  for (const auto& lu : ops.A1) out.push_back(KrylovOperator::solve(lu));
  for (const auto& lu : ops.A3) out.push_back(KrylovOperator::solve(lu));
  for (const auto& d : ops.Phi1) out.push_back(KrylovOperator::scale(d));
  for (const auto& d : ops.Sigma1) out.push_back(KrylovOperator::scale(d));
  return out;
}

// Operator list on the y side: P2, P2⁻¹, A2⁻¹, A4⁻¹, Φ2x, Σ2x.
inline std::vector<KrylovOperator> krylov_operators_y(const OperatorSet& ops) {
  std::vector<KrylovOperator> out;
  if (ops.P2lu) {
    out.push_back(KrylovOperator::multiply(ops.P2));
    out.push_back(KrylovOperator::solve(*ops.P2lu));
  }
  for (const auto& lu : ops.A2) out.push_back(KrylovOperator::solve(lu));
  for (const auto& lu : ops.A4) out.push_back(KrylovOperator::solve(lu));
  for (const auto& d : ops.Phi2) out.push_back(KrylovOperator::scale(d));
  for (const auto& d : ops.Sigma2) out.push_back(KrylovOperator::scale(d));
  return out;
}

namespace detail {

// Chains keep their natural scale; a whole chain is scaled down only when it
// approaches overflow.
inline void guard_overflow(DenseMatrix& W) {
  const double m = max_abs(W);
  if (m > 1e150) W *= 1.0 / m;
}

// W -= Q (Qᵀ W)
inline void project_out(const DenseMatrix& Q, DenseMatrix& W) {
  if (Q.cols() == 0 || W.cols() == 0) return;
  const DenseMatrix C = matmul_tn(Q, W);
  gemm(Trans::N, Trans::N, -1.0, Q, C, 1.0, W);
}

}  // namespace detail

// Advances every chain by one power and appends the truncated new directions.
// The previous basis is kept verbatim, so spans are nested and U0 is never lost;
// only the part of the new blocks orthogonal to it goes through the
// SVD-truncated QR.
inline void krylov_augment(KrylovBasis& basis, const std::vector<KrylovOperator>& ops, double eps_kappa) {
  if (ops.size() != basis.chains.size()) throw Error("krylov_augment: operator list changed");
  for (std::size_t i = 0; i < ops.size(); ++i) {
    basis.chains[i] = ops[i].apply(basis.chains[i]);
    detail::guard_overflow(basis.chains[i]);
  }
  ++basis.iteration;
  if (basis.chains.empty() || basis.r0 == 0) return;

  DenseMatrix W = hcat(basis.chains);
  detail::project_out(basis.Q, W);
  detail::project_out(basis.Q, W);
  // The floor keeps rounding noise out when eps_kappa is zero.
  const double threshold = std::max(eps_kappa, 1e-13);
  const DenseMatrix fresh = svd_truncated_qr(std::vector<DenseMatrix>{W}, threshold);
  if (fresh.cols() == 0) return;
  DenseMatrix add = fresh;
  detail::project_out(basis.Q, add);
  add = reduced_qr(add).Q;
  const DenseMatrix parts[2] = {basis.Q, add};
  basis.Q = hcat(parts);
}

// Uᵀ M V using the banded or diagonal structure of M.
inline DenseMatrix galerkin_project(const DenseMatrix& U, const Op1D& M, const DenseMatrix& V) {
  return matmul_tn(U, M.apply(V));
}

inline DenseMatrix galerkin_project(const DenseMatrix& U, const TridiagonalMatrix& M, const DenseMatrix& V) {
  return matmul_tn(U, M.apply(V));
}

inline DenseMatrix galerkin_project(const DenseMatrix& U, const std::vector<double>& d, const DenseMatrix& V) {
  return matmul_tn(U, scale_rows(d, V));
}

}  // namespace arks
