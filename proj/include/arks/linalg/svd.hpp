#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "arks/errors.hpp"
#include "arks/linalg/dense.hpp"

namespace arks {

struct SVDResult {
  DenseMatrix U;              // m × k
  std::vector<double> sigma;  // k, non-increasing
  DenseMatrix V;              // n × k
};

namespace detail {

// Householder bidiagonalization followed by implicit-shift QR on the
// bidiagonal (Golub-Kahan). Requires m >= n.
inline SVDResult svd_tall(DenseMatrix A) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  const int nu = std::min(m, n);
  std::vector<double> s(std::min(m + 1, n), 0.0);
  std::vector<double> e(n, 0.0), work(m, 0.0);
  DenseMatrix U(m, nu), V(n, n);

  const int nct = std::min(m - 1, n);
  const int nrt = std::max(0, std::min(n - 2, m));
  for (int k = 0; k < std::max(nct, nrt); ++k) {
    if (k < nct) {
      s[k] = 0;
      for (int i = k; i < m; ++i) s[k] = std::hypot(s[k], A(i, k));
      if (s[k] != 0.0) {
        if (A(k, k) < 0.0) s[k] = -s[k];
        for (int i = k; i < m; ++i) A(i, k) /= s[k];
        A(k, k) += 1.0;
      }
      s[k] = -s[k];
    }
    for (int j = k + 1; j < n; ++j) {
      if (k < nct && s[k] != 0.0) {
        double t = 0;
        for (int i = k; i < m; ++i) t += A(i, k) * A(i, j);
        t = -t / A(k, k);
        for (int i = k; i < m; ++i) A(i, j) += t * A(i, k);
      }
      e[j] = A(k, j);
    }
    if (k < nct)
      for (int i = k; i < m; ++i) U(i, k) = A(i, k);
    if (k < nrt) {
      e[k] = 0;
      for (int i = k + 1; i < n; ++i) e[k] = std::hypot(e[k], e[i]);
      if (e[k] != 0.0) {
        if (e[k + 1] < 0.0) e[k] = -e[k];
        for (int i = k + 1; i < n; ++i) e[i] /= e[k];
        e[k + 1] += 1.0;
      }
      e[k] = -e[k];
      if (k + 1 < m && e[k] != 0.0) {
        for (int i = k + 1; i < m; ++i) work[i] = 0.0;
        for (int j = k + 1; j < n; ++j)
          for (int i = k + 1; i < m; ++i) work[i] += e[j] * A(i, j);
        for (int j = k + 1; j < n; ++j) {
          const double t = -e[j] / e[k + 1];
          for (int i = k + 1; i < m; ++i) A(i, j) += t * work[i];
        }
      }
      for (int i = k + 1; i < n; ++i) V(i, k) = e[i];
    }
  }

  int p = std::min(n, m + 1);
  if (nct < n) s[nct] = A(nct, nct);
  if (m < p) s[p - 1] = 0.0;
  if (nrt + 1 < p) e[nrt] = A(nrt, p - 1);
  e[p - 1] = 0.0;

  for (int j = nct; j < nu; ++j) {
    for (int i = 0; i < m; ++i) U(i, j) = 0.0;
    U(j, j) = 1.0;
  }
  for (int k = nct - 1; k >= 0; --k) {
    if (s[k] != 0.0) {
      for (int j = k + 1; j < nu; ++j) {
        double t = 0;
        for (int i = k; i < m; ++i) t += U(i, k) * U(i, j);
        t = -t / U(k, k);
        for (int i = k; i < m; ++i) U(i, j) += t * U(i, k);
      }
      for (int i = k; i < m; ++i) U(i, k) = -U(i, k);
      U(k, k) = 1.0 + U(k, k);
      for (int i = 0; i < k - 1; ++i) U(i, k) = 0.0;
    } else {
      for (int i = 0; i < m; ++i) U(i, k) = 0.0;
      U(k, k) = 1.0;
    }
  }
  for (int k = n - 1; k >= 0; --k) {
    if (k < nrt && e[k] != 0.0) {
      for (int j = k + 1; j < nu; ++j) {
        double t = 0;
        for (int i = k + 1; i < n; ++i) t += V(i, k) * V(i, j);
        t = -t / V(k + 1, k);
        for (int i = k + 1; i < n; ++i) V(i, j) += t * V(i, k);
      }
    }
    for (int i = 0; i < n; ++i) V(i, k) = 0.0;
    V(k, k) = 1.0;
  }

  auto rot_cols = [](DenseMatrix& M, int rows, int a, int b, double cs, double sn) {
    for (int i = 0; i < rows; ++i) {
      const double t = cs * M(i, a) + sn * M(i, b);
      M(i, b) = -sn * M(i, a) + cs * M(i, b);
      M(i, a) = t;
    }
  };

  const int pp = p - 1;
  const double eps = std::ldexp(1.0, -52);
  const double tiny = std::ldexp(1.0, -966);
  long total_steps = 0;
  const long max_steps = 75L * std::max(n, 10);
  while (p > 0) {
    int k, kase;
    for (k = p - 2; k >= -1; --k) {
      if (k == -1) break;
      if (std::abs(e[k]) <= tiny + eps * (std::abs(s[k]) + std::abs(s[k + 1]))) {
        e[k] = 0.0;
        break;
      }
    }
    if (k == p - 2) {
      kase = 4;
    } else {
      int ks;
      for (ks = p - 1; ks >= k; --ks) {
        if (ks == k) break;
        const double t = (ks != p ? std::abs(e[ks]) : 0.) + (ks != k + 1 ? std::abs(e[ks - 1]) : 0.);
        if (std::abs(s[ks]) <= tiny + eps * t) {
          s[ks] = 0.0;
          break;
        }
      }
      if (ks == k) {
        kase = 3;
      } else if (ks == p - 1) {
        kase = 1;
      } else {
        kase = 2;
        k = ks;
      }
    }
    ++k;

    switch (kase) {
      case 1: {  // deflate negligible s(p)
        double f = e[p - 2];
        e[p - 2] = 0.0;
        for (int j = p - 2; j >= k; --j) {
          double t = std::hypot(s[j], f);
          const double cs = s[j] / t, sn = f / t;
          s[j] = t;
          if (j != k) {
            f = -sn * e[j - 1];
            e[j - 1] = cs * e[j - 1];
          }
          rot_cols(V, n, j, p - 1, cs, sn);
        }
      } break;
      case 2: {  // split at negligible s(k)
        double f = e[k - 1];
        e[k - 1] = 0.0;
        for (int j = k; j < p; ++j) {
          double t = std::hypot(s[j], f);
          const double cs = s[j] / t, sn = f / t;
          s[j] = t;
          f = -sn * e[j];
          e[j] = cs * e[j];
          rot_cols(U, m, j, k - 1, cs, sn);
        }
      } break;
      case 3: {  // one QR step
        if (++total_steps > max_steps) throw ConvergenceError("dense_svd: QR sweeps did not converge", {});
        const double scale = std::max({std::abs(s[p - 1]), std::abs(s[p - 2]), std::abs(e[p - 2]),
                                       std::abs(s[k]), std::abs(e[k])});
        const double sp = s[p - 1] / scale;
        const double spm1 = s[p - 2] / scale;
        const double epm1 = e[p - 2] / scale;
        const double sk = s[k] / scale;
        const double ek = e[k] / scale;
        const double b = ((spm1 + sp) * (spm1 - sp) + epm1 * epm1) / 2.0;
        const double c = (sp * epm1) * (sp * epm1);
        double shift = 0.0;
        if (b != 0.0 || c != 0.0) {
          shift = std::sqrt(b * b + c);
          if (b < 0.0) shift = -shift;
          shift = c / (b + shift);
        }
        double f = (sk + sp) * (sk - sp) + shift;
        double g = sk * ek;
        for (int j = k; j < p - 1; ++j) {
          double t = std::hypot(f, g);
          double cs = f / t, sn = g / t;
          if (j != k) e[j - 1] = t;
          f = cs * s[j] + sn * e[j];
          e[j] = cs * e[j] - sn * s[j];
          g = sn * s[j + 1];
          s[j + 1] = cs * s[j + 1];
          rot_cols(V, n, j, j + 1, cs, sn);
          t = std::hypot(f, g);
          cs = f / t;
          sn = g / t;
          s[j] = t;
          f = cs * e[j] + sn * s[j + 1];
          s[j + 1] = -sn * e[j] + cs * s[j + 1];
          g = sn * e[j + 1];
          e[j + 1] = cs * e[j + 1];
          if (j < m - 1) rot_cols(U, m, j, j + 1, cs, sn);
        }
        e[p - 2] = f;
      } break;
      case 4: {  // convergence
        if (s[k] <= 0.0) {
          s[k] = (s[k] < 0.0 ? -s[k] : 0.0);
          for (int i = 0; i <= pp; ++i) V(i, k) = -V(i, k);
        }
        while (k < pp) {
          if (s[k] >= s[k + 1]) break;
          std::swap(s[k], s[k + 1]);
          if (k < n - 1)
            for (int i = 0; i < n; ++i) std::swap(V(i, k + 1), V(i, k));
          if (k < m - 1)
            for (int i = 0; i < m; ++i) std::swap(U(i, k + 1), U(i, k));
          ++k;
        }
        --p;
      } break;
    }
  }
  SVDResult out;
  out.U = std::move(U);
  out.sigma.assign(s.begin(), s.begin() + nu);
  out.V = V.cols_range(0, nu);
  return out;
}

}  // namespace detail

// Thin SVD M = U diag(sigma) Vᵀ.
inline SVDResult dense_svd(const DenseMatrix& M) {
  if (!M.all_finite()) throw Error("dense_svd: non-finite input");
  if (M.rows() == 0 || M.cols() == 0) return {DenseMatrix(M.rows(), 0), {}, DenseMatrix(M.cols(), 0)};
  if (M.rows() >= M.cols()) return detail::svd_tall(M);
  SVDResult t = detail::svd_tall(M.transpose());
  return {std::move(t.V), std::move(t.sigma), std::move(t.U)};
}

}  // namespace arks
