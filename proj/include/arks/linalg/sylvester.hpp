#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "arks/errors.hpp"
#include "arks/linalg/dense.hpp"
#include "arks/linalg/schur.hpp"

namespace arks {

namespace detail {

// Gaussian elimination with partial pivoting on a k×k system, k ≤ 4.
inline void small_solve(int k, double* M /* row-major k×k */, double* b, double tiny) {
  for (int c = 0; c < k; ++c) {
    int piv = c;
    for (int r = c + 1; r < k; ++r)
      if (std::abs(M[r * k + c]) > std::abs(M[piv * k + c])) piv = r;
    if (!(std::abs(M[piv * k + c]) > tiny))
      throw SingularOperatorError("sylvester_solve: singular Sylvester operator (spectra of A and -B collide)");
    if (piv != c) {
      for (int j = 0; j < k; ++j) std::swap(M[c * k + j], M[piv * k + j]);
      std::swap(b[c], b[piv]);
    }
    for (int r = c + 1; r < k; ++r) {
      const double f = M[r * k + c] / M[c * k + c];
      if (f == 0.0) continue;
      for (int j = c; j < k; ++j) M[r * k + j] -= f * M[c * k + j];
      b[r] -= f * b[c];
    }
  }
  for (int r = k - 1; r >= 0; --r) {
    double s = b[r];
    for (int j = r + 1; j < k; ++j) s -= M[r * k + j] * b[j];
    b[r] = s / M[r * k + r];
  }
}

}  // namespace detail

// Solves TA Y + Y TBᵀ = F for quasi-triangular TA (p×p) and TB (q×q).
inline DenseMatrix quasi_triangular_sylvester(const SchurForm& SA, const SchurForm& SB, DenseMatrix F) {
  const DenseMatrix& TA = SA.T;
  const DenseMatrix& TB = SB.T;
  const std::size_t p = TA.rows(), q = TB.rows();
  if (F.rows() != p || F.cols() != q) throw Error("sylvester_solve: dimension mismatch");
  const double scale = std::max({max_abs(TA), max_abs(TB), 1e-300});
  const double tiny = 1e-13 * scale;
  const auto rowb = SA.block_starts();
  const auto colb = SB.block_starts();
  DenseMatrix& Y = F;  // overwritten in place, block column by block column

  for (std::size_t cb = colb.size(); cb-- > 0;) {
    const std::size_t j0 = colb[cb];
    const std::size_t nj = (cb + 1 < colb.size() ? colb[cb + 1] : q) - j0;
    // Move the already solved columns to the right-hand side.
    for (std::size_t jj = j0; jj < j0 + nj; ++jj)
      for (std::size_t k = j0 + nj; k < q; ++k) {
        const double t = TB(jj, k);
        if (t != 0.0) axpy(-t, Y.col(k), Y.col(jj), p);
      }
    for (std::size_t rb = rowb.size(); rb-- > 0;) {
      const std::size_t i0 = rowb[rb];
      const std::size_t ni = (rb + 1 < rowb.size() ? rowb[rb + 1] : p) - i0;
      double rhs[4];
      for (std::size_t jj = 0; jj < nj; ++jj)
        for (std::size_t ii = 0; ii < ni; ++ii) {
          double s = Y(i0 + ii, j0 + jj);
          for (std::size_t i = i0 + ni; i < p; ++i) s -= TA(i0 + ii, i) * Y(i, j0 + jj);
          rhs[jj * ni + ii] = s;
        }
      // (I ⊗ TA_II + TB_JJ ⊗ I) vec(Y_IJ) = vec(rhs)
      const int k = static_cast<int>(ni * nj);
      double M[16] = {};
      for (std::size_t jj = 0; jj < nj; ++jj)
        for (std::size_t ii = 0; ii < ni; ++ii) {
          const std::size_t row = jj * ni + ii;
          for (std::size_t i2 = 0; i2 < ni; ++i2) M[row * k + jj * ni + i2] += TA(i0 + ii, i0 + i2);
          for (std::size_t j2 = 0; j2 < nj; ++j2) M[row * k + j2 * ni + ii] += TB(j0 + jj, j0 + j2);
        }
      detail::small_solve(k, M, rhs, tiny);
      for (std::size_t jj = 0; jj < nj; ++jj)
        for (std::size_t ii = 0; ii < ni; ++ii) Y(i0 + ii, j0 + jj) = rhs[jj * ni + ii];
    }
  }
  return Y;
}

// Solves A Z + Z Bᵀ = C given cached Schur forms of A and B.
inline DenseMatrix sylvester_solve(const SchurForm& SA, const SchurForm& SB, const DenseMatrix& C) {
  DenseMatrix F = matmul(matmul_tn(SA.Q, C), SB.Q);
  DenseMatrix Y = quasi_triangular_sylvester(SA, SB, std::move(F));
  return matmul_nt(matmul(SA.Q, Y), SB.Q);
}

// Bartels-Stewart: solves A Z + Z Bᵀ = C.
inline DenseMatrix sylvester_solve(const DenseMatrix& A, const DenseMatrix& B, const DenseMatrix& C) {
  if (A.rows() != A.cols() || B.rows() != B.cols()) throw Error("sylvester_solve: A and B must be square");
  if (C.rows() != A.rows() || C.cols() != B.rows()) throw Error("sylvester_solve: dimension mismatch");
  return sylvester_solve(real_schur(A), real_schur(B), C);
}

}  // namespace arks
