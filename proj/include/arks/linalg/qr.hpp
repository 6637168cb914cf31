#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "arks/linalg/dense.hpp"

namespace arks {

struct QRResult {
  DenseMatrix Q;  // m × k, k = min(m, n)
  DenseMatrix R;  // k × n, upper trapezoidal
};

namespace detail {

inline double norm2(const double* x, std::size_t n) { return std::sqrt(dot(x, x, n)); }

// Modified Gram-Schmidt sweeps of v against columns [q0, q) of Q,
// accumulating the coefficients into r when non-null.
inline void mgs_sweeps(const DenseMatrix& Q, std::size_t q, double* v, double* r, int passes, std::size_t q0 = 0) {
  const std::size_t m = Q.rows();
#ifdef ARKS_USE_CBLAS
  // Classical Gram-Schmidt per pass through matrix-vector products; with two
  // passes it is as stable as the modified variant.
  if (q > q0 && passes >= 2 && static_cast<double>(m) * static_cast<double>(q - q0) >= 32768.0) {
    const std::size_t w = q - q0;
    std::vector<double> c(w);
    for (int pass = 0; pass < passes; ++pass) {
      cblas_dgemv(CblasColMajor, CblasTrans, static_cast<int>(m), static_cast<int>(w), 1.0, Q.col(q0),
                  static_cast<int>(m), v, 1, 0.0, c.data(), 1);
      cblas_dgemv(CblasColMajor, CblasNoTrans, static_cast<int>(m), static_cast<int>(w), -1.0, Q.col(q0),
                  static_cast<int>(m), c.data(), 1, 1.0, v, 1);
      if (r)
        for (std::size_t i = 0; i < w; ++i) r[q0 + i] += c[i];
    }
    return;
  }
#endif
  for (int pass = 0; pass < passes; ++pass) {
    for (std::size_t i = q0; i < q; ++i) {
      const double c = dot(Q.col(i), v, m);
      if (r) r[i] += c;
      axpy(-c, Q.col(i), v, m);
    }
  }
}

// Unit vector orthogonal to the first q columns of Q, used when a column is
// numerically dependent.
inline void complete_column(const DenseMatrix& Q, std::size_t q, double* v) {
  const std::size_t m = Q.rows();
  // The coordinate axis with the smallest projection onto span(Q) is the
  // best-conditioned starting point.
  std::vector<double> proj(m, 0.0);
  for (std::size_t i = 0; i < q; ++i) {
    const double* c = Q.col(i);
    for (std::size_t k = 0; k < m; ++k) proj[k] += c[k] * c[k];
  }
  const std::size_t pick = static_cast<std::size_t>(std::min_element(proj.begin(), proj.end()) - proj.begin());
  std::fill(v, v + m, 0.0);
  v[pick] = 1.0;
  mgs_sweeps(Q, q, v, nullptr, 2);
  const double nrm = norm2(v, m);
  for (std::size_t k = 0; k < m; ++k) v[k] /= nrm;
}

}  // namespace detail

namespace detail {

// Block Gram-Schmidt with reorthogonalization: each panel is projected against
// the finished columns by two matrix products, then orthogonalized internally
// by modified Gram-Schmidt. With drop > 0, a column whose remainder is at most
// drop times its original norm adds no new direction.
inline QRResult block_gram_schmidt(const DenseMatrix& M, double drop) {
  const std::size_t m = M.rows();
  const std::size_t n = M.cols();
  const std::size_t k = std::min(m, n);
  constexpr std::size_t panel = 32;
  QRResult out{DenseMatrix(m, k), DenseMatrix(k, n)};
  DenseMatrix& Q = out.Q;
  DenseMatrix& R = out.R;
  std::vector<double> r(k);
  std::size_t q = 0;
  for (std::size_t j0 = 0; j0 < n; j0 += panel) {
    const std::size_t b = std::min(panel, n - j0);
    DenseMatrix P = M.cols_range(j0, b);
    std::vector<double> orig(b);
    for (std::size_t c = 0; c < b; ++c) orig[c] = norm2(P.col(c), m);
    const std::size_t q_panel = q;
    if (q_panel > 0) {
      const DenseMatrix Qd = Q.cols_range(0, q_panel);
      for (int pass = 0; pass < 2; ++pass) {
        const DenseMatrix C = matmul_tn(Qd, P);
        for (std::size_t c = 0; c < b; ++c)
          for (std::size_t i = 0; i < q_panel; ++i) R(i, j0 + c) += C(i, c);
        gemm(Trans::N, Trans::N, -1.0, Qd, C, 1.0, P);
      }
    }
    for (std::size_t c = 0; c < b; ++c) {
      const std::size_t j = j0 + c;
      double* v = P.col(c);
      std::fill(r.begin(), r.end(), 0.0);
      mgs_sweeps(Q, q, v, r.data(), 2, q_panel);
      for (std::size_t i = q_panel; i < q; ++i) R(i, j) += r[i];
      if (q == k) continue;
      const double nrm = norm2(v, m);
      if (drop > 0.0 && nrm <= drop * orig[c]) continue;
      R(q, j) = nrm;
      double* qc = Q.col(q);
      if (nrm > 0.0 && nrm > 1e-300) {
        for (std::size_t i = 0; i < m; ++i) qc[i] = v[i] / nrm;
        if (nrm < 1e-8 * orig[c]) {
          // The remainder is mostly rounding noise; clean its direction.
          mgs_sweeps(Q, q, qc, nullptr, 2);
          const double again = norm2(qc, m);
          if (again > 0.5) {
            for (std::size_t i = 0; i < m; ++i) qc[i] /= again;
          } else {
            complete_column(Q, q, qc);
          }
        }
      } else {
        R(q, j) = 0.0;
        complete_column(Q, q, qc);
      }
      ++q;
    }
  }
  if (q < k) {
    out.Q = Q.cols_range(0, q);
    out.R = R.block(0, 0, q, n);
  }
  return out;
}

}  // namespace detail

// Q (m × min(m, n)) with orthonormal columns and upper trapezoidal R.
// Dependent columns get a zero (or near-zero) diagonal in R and an arbitrary
// orthonormal completion in Q.
inline QRResult reduced_qr(const DenseMatrix& M) { return detail::block_gram_schmidt(M, 0.0); }

// M = Q R up to rounding, where Q keeps only directions whose remainder
// exceeds 1e-13 of the original column norm. R is q × n with rows in
// staircase form.
inline QRResult compact_qr(const DenseMatrix& M) { return detail::block_gram_schmidt(M, 1e-13); }

}  // namespace arks
