#pragma once

#include <cstddef>
#include <vector>

#include "arks/errors.hpp"
#include "arks/linalg/dense.hpp"
#include "arks/linalg/schur.hpp"
#include "arks/linalg/sylvester.hpp"
#include "arks/lowrank/krylov.hpp"
#include "arks/operators.hpp"

namespace arks {

// Projected system S − dt Σ L̃_t S R̃_tᵀ = B̃ with the averaged-coefficient
// Sylvester preconditioner P̃1 Z + Z P̃2ᵀ.
struct ReducedSystem {
  std::vector<DenseMatrix> left;   // r_x × r_x per term
  std::vector<DenseMatrix> right;  // r_y × r_y per term
  DenseMatrix P1, P2;
  SchurForm P1_schur, P2_schur;
  DenseMatrix B;
  double dt_diag = 0.0;

  std::size_t rx() const { return P1.rows(); }
  std::size_t ry() const { return P2.rows(); }
};

inline ReducedSystem build_reduced_system(const DenseMatrix& U1, const DenseMatrix& V1, const OperatorSet& ops,
                                          DenseMatrix B_tilde) {
  if (B_tilde.rows() != U1.cols() || B_tilde.cols() != V1.cols())
    throw Error("build_reduced_system: right-hand side does not match the bases");
  ReducedSystem sys;
  sys.dt_diag = ops.dt_diag;
  for (const auto& t : ops.terms()) {
    sys.left.push_back(galerkin_project(U1, t.left, U1));
    sys.right.push_back(galerkin_project(V1, t.right, V1));
  }
  sys.P1 = ops.has_x_terms() ? galerkin_project(U1, ops.P1, U1) : DenseMatrix(U1.cols(), U1.cols());
  sys.P2 = ops.has_y_terms() ? galerkin_project(V1, ops.P2, V1) : DenseMatrix(V1.cols(), V1.cols());
  sys.P1_schur = real_schur(sys.P1);
  sys.P2_schur = real_schur(sys.P2);
  sys.B = std::move(B_tilde);
  return sys;
}

// S − dt Σ L̃ S R̃ᵀ
inline DenseMatrix reduced_apply(const ReducedSystem& sys, const DenseMatrix& S) {
  if (S.rows() != sys.rx() || S.cols() != sys.ry()) throw Error("reduced_apply: dimension mismatch");
  DenseMatrix out = S;
  for (std::size_t t = 0; t < sys.left.size(); ++t) {
    const DenseMatrix LS = matmul(sys.left[t], S);
    gemm(Trans::N, Trans::T, -sys.dt_diag, LS, sys.right[t], 1.0, out);
  }
  return out;
}

// Z with P̃1 Z + Z P̃2ᵀ = Ẑ, reusing the cached Schur forms.
inline DenseMatrix acs_precondition(const ReducedSystem& sys, const DenseMatrix& Zhat) {
  return sylvester_solve(sys.P1_schur, sys.P2_schur, Zhat);
}

}  // namespace arks
