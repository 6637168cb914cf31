#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "arks/errors.hpp"
#include "arks/linalg/dense.hpp"

namespace arks {

// A = Q T Qᵀ with T quasi-upper-triangular (1×1 and 2×2 diagonal blocks).
struct SchurForm {
  DenseMatrix Q;
  DenseMatrix T;

  // Index where each diagonal block starts, in order.
  std::vector<std::size_t> block_starts() const {
    std::vector<std::size_t> starts;
    const std::size_t n = T.rows();
    for (std::size_t i = 0; i < n;) {
      starts.push_back(i);
      i += (i + 1 < n && T(i + 1, i) != 0.0) ? 2 : 1;
    }
    return starts;
  }
};

namespace detail {

// Applies the reflector I − tau v vᵀ (length len, rows r0..) to columns c0..c1-1.
inline void reflect_rows(DenseMatrix& H, std::size_t r0, const double* v, std::size_t len, double tau,
                         std::size_t c0, std::size_t c1) {
  for (std::size_t c = c0; c < c1; ++c) {
    double s = 0.0;
    for (std::size_t k = 0; k < len; ++k) s += v[k] * H(r0 + k, c);
    s *= tau;
    for (std::size_t k = 0; k < len; ++k) H(r0 + k, c) -= s * v[k];
  }
}

// Applies the reflector from the right to columns c0..c0+len-1, rows 0..r1-1.
inline void reflect_cols(DenseMatrix& H, std::size_t c0, const double* v, std::size_t len, double tau,
                         std::size_t r1) {
  for (std::size_t r = 0; r < r1; ++r) {
    double s = 0.0;
    for (std::size_t k = 0; k < len; ++k) s += H(r, c0 + k) * v[k];
    s *= tau;
    for (std::size_t k = 0; k < len; ++k) H(r, c0 + k) -= s * v[k];
  }
}

// v := x + sign(x0)‖x‖ e0 scaled so v0 = 1; returns tau = 2 / vᵀv (0 if x = 0).
inline double householder(double* v, std::size_t len) {
  double nrm = 0.0;
  for (std::size_t k = 0; k < len; ++k) nrm = std::hypot(nrm, v[k]);
  if (nrm == 0.0) return 0.0;
  const double alpha = v[0] >= 0 ? nrm : -nrm;
  const double v0 = v[0] + alpha;
  if (v0 == 0.0) return 0.0;
  double vtv = 1.0;
  for (std::size_t k = 1; k < len; ++k) {
    v[k] /= v0;
    vtv += v[k] * v[k];
  }
  v[0] = 1.0;
  return 2.0 / vtv;
}

inline void rotate_rows(DenseMatrix& H, std::size_t a, std::size_t b, double c, double s, std::size_t c0,
                        std::size_t c1) {
  for (std::size_t j = c0; j < c1; ++j) {
    const double x = H(a, j), y = H(b, j);
    H(a, j) = c * x + s * y;
    H(b, j) = -s * x + c * y;
  }
}

inline void rotate_cols(DenseMatrix& H, std::size_t a, std::size_t b, double c, double s, std::size_t r1) {
  for (std::size_t i = 0; i < r1; ++i) {
    const double x = H(i, a), y = H(i, b);
    H(i, a) = c * x + s * y;
    H(i, b) = -s * x + c * y;
  }
}

// Triangularizes a 2×2 diagonal block at p when its eigenvalues are real.
inline void standardize_block(DenseMatrix& H, DenseMatrix& Q, std::size_t p) {
  const std::size_t n = H.rows();
  const double a = H(p, p), b = H(p, p + 1), c = H(p + 1, p), d = H(p + 1, p + 1);
  if (c == 0.0) return;
  const double half = 0.5 * (a - d);
  const double disc = half * half + b * c;
  if (disc < 0.0) return;
  const double root = std::sqrt(disc);
  const double lambda = 0.5 * (a + d) + (half >= 0 ? root : -root);
  // Eigenvector candidates (λ − d, c) and (b, λ − a); take the larger one.
  double x1 = lambda - d, y1 = c;
  double x2 = b, y2 = lambda - a;
  double x = x1, y = y1;
  if (std::hypot(x2, y2) > std::hypot(x1, y1)) {
    x = x2;
    y = y2;
  }
  const double r = std::hypot(x, y);
  if (r == 0.0) return;
  const double cs = x / r, sn = y / r;
  rotate_rows(H, p, p + 1, cs, sn, p, n);
  rotate_cols(H, p, p + 1, cs, sn, std::min(p + 2, n));
  rotate_cols(Q, p, p + 1, cs, sn, n);
  H(p + 1, p) = 0.0;
}

}  // namespace detail

// Householder Hessenberg reduction followed by Francis double-shift QR with
// accumulated orthogonal factor.
inline SchurForm real_schur(const DenseMatrix& A) {
  if (A.rows() != A.cols()) throw Error("real_schur: matrix must be square");
  if (!A.all_finite()) throw Error("real_schur: non-finite input");
  const std::size_t n = A.rows();
  DenseMatrix H = A;
  DenseMatrix Q = DenseMatrix::identity(n);
  if (n <= 1) return {Q, H};

  std::vector<double> v(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t len = n - k - 1;
    for (std::size_t i = 0; i < len; ++i) v[i] = H(k + 1 + i, k);
    const double tau = detail::householder(v.data(), len);
    if (tau == 0.0) continue;
    detail::reflect_rows(H, k + 1, v.data(), len, tau, k, n);
    detail::reflect_cols(H, k + 1, v.data(), len, tau, n);
    detail::reflect_cols(Q, k + 1, v.data(), len, tau, n);
    for (std::size_t i = k + 2; i < n; ++i) H(i, k) = 0.0;
  }

  double norm = 0.0;
  for (std::size_t k = 0; k < H.size(); ++k) norm = std::max(norm, std::abs(H.data()[k]));
  const double eps = std::ldexp(1.0, -52);
  const long max_iter = 100L * static_cast<long>(n);
  long total = 0;
  int since_deflation = 0;

  std::ptrdiff_t hi = static_cast<std::ptrdiff_t>(n) - 1;
  while (hi >= 0) {
    std::ptrdiff_t l = hi;
    while (l > 0) {
      double s = std::abs(H(l - 1, l - 1)) + std::abs(H(l, l));
      if (s == 0.0) s = norm;
      if (std::abs(H(l, l - 1)) < eps * s) {
        H(l, l - 1) = 0.0;
        break;
      }
      --l;
    }
    if (l == hi) {
      --hi;
      since_deflation = 0;
      continue;
    }
    if (l == hi - 1) {
      detail::standardize_block(H, Q, static_cast<std::size_t>(l));
      hi -= 2;
      since_deflation = 0;
      continue;
    }
    if (++total > max_iter) throw ConvergenceError("real_schur: QR iteration did not converge", {});
    ++since_deflation;

    // Shifts and the first column of their polynomial in coordinates shifted
    // by t = H(hi, hi), which avoids cancellation for clustered eigenvalues.
    const double t = H(hi, hi);
    double sum, prod;
    if (since_deflation % 10 == 0) {
      const double s = std::abs(H(hi, hi - 1)) + std::abs(H(hi - 1, hi - 2));
      sum = 1.5 * s;
      prod = s * s;
    } else {
      sum = H(hi - 1, hi - 1) - t;
      prod = -H(hi - 1, hi) * H(hi, hi - 1);
    }
    const double a00 = H(l, l) - t, a11 = H(l + 1, l + 1) - t;
    double x = a00 * a00 + H(l, l + 1) * H(l + 1, l) - sum * a00 + prod;
    double y = H(l + 1, l) * (a00 + a11 - sum);
    double z = H(l + 1, l) * H(l + 2, l + 1);
    const std::size_t un = n;
    for (std::ptrdiff_t k = l; k + 2 <= hi; ++k) {
      double w[3] = {x, y, z};
      const double tau = detail::householder(w, 3);
      const std::size_t uk = static_cast<std::size_t>(k);
      if (tau != 0.0) {
        const std::size_t c0 = static_cast<std::size_t>(std::max(l, k - 1));
        detail::reflect_rows(H, uk, w, 3, tau, c0, un);
        const std::size_t r1 = static_cast<std::size_t>(std::min(k + 3, hi)) + 1;
        detail::reflect_cols(H, uk, w, 3, tau, r1);
        detail::reflect_cols(Q, uk, w, 3, tau, un);
      }
      if (k > l) {
        H(uk + 1, uk - 1) = 0.0;
        H(uk + 2, uk - 1) = 0.0;
      }
      x = H(uk + 1, uk);
      y = H(uk + 2, uk);
      if (k + 3 <= hi) z = H(uk + 3, uk);
    }
    // Closing rotation on rows hi-1, hi.
    const double r = std::hypot(x, y);
    if (r != 0.0) {
      const double cs = x / r, sn = y / r;
      const std::size_t a = static_cast<std::size_t>(hi - 1), b = static_cast<std::size_t>(hi);
      detail::rotate_rows(H, a, b, cs, sn, static_cast<std::size_t>(hi - 2), un);
      detail::rotate_cols(H, a, b, cs, sn, b + 1);
      detail::rotate_cols(Q, a, b, cs, sn, un);
      H(b, a - 1) = 0.0;
    }
  }
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = j + 2; i < n; ++i) H(i, j) = 0.0;
  return {std::move(Q), std::move(H)};
}

}  // namespace arks
