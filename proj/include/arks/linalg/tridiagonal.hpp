#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "arks/errors.hpp"
#include "arks/linalg/dense.hpp"

namespace arks {

struct TridiagonalMatrix {
  std::vector<double> sub;    // n-1, sub[i] = A(i+1, i)
  std::vector<double> diag;   // n
  std::vector<double> super;  // n-1, super[i] = A(i, i+1)

  TridiagonalMatrix() = default;
  explicit TridiagonalMatrix(std::size_t n)
      : sub(n ? n - 1 : 0), diag(n), super(n ? n - 1 : 0) {}

  static TridiagonalMatrix identity(std::size_t n, double scale = 1.0) {
    TridiagonalMatrix t(n);
    std::fill(t.diag.begin(), t.diag.end(), scale);
    return t;
  }

  std::size_t n() const { return diag.size(); }

  void validate() const {
    const std::size_t m = diag.size();
    if (m == 0 || sub.size() != m - 1 || super.size() != m - 1)
      throw Error("TridiagonalMatrix: inconsistent band lengths");
    auto finite = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    if (!finite(sub) || !finite(diag) || !finite(super))
      throw Error("TridiagonalMatrix: non-finite entry");
  }

  TridiagonalMatrix& operator+=(const TridiagonalMatrix& b) {
    axpy(1.0, b);
    return *this;
  }

  // this += s * b
  void axpy(double s, const TridiagonalMatrix& b) {
    if (b.n() != n()) throw Error("TridiagonalMatrix: dimension mismatch");
    for (std::size_t i = 0; i < diag.size(); ++i) diag[i] += s * b.diag[i];
    for (std::size_t i = 0; i < sub.size(); ++i) {
      sub[i] += s * b.sub[i];
      super[i] += s * b.super[i];
    }
  }

  TridiagonalMatrix scaled(double s) const {
    TridiagonalMatrix t = *this;
    for (double& v : t.sub) v *= s;
    for (double& v : t.diag) v *= s;
    for (double& v : t.super) v *= s;
    return t;
  }

  // Y = A X, column by column.
  DenseMatrix apply(const DenseMatrix& X) const {
    const std::size_t m = n();
    if (X.rows() != m) throw Error("TridiagonalMatrix::apply: dimension mismatch");
    DenseMatrix Y(m, X.cols());
    for (std::size_t j = 0; j < X.cols(); ++j) apply_vec(X.col(j), Y.col(j));
    return Y;
  }

  void apply_vec(const double* x, double* y) const {
    const std::size_t m = n();
    if (m == 1) {
      y[0] = diag[0] * x[0];
      return;
    }
    y[0] = diag[0] * x[0] + super[0] * x[1];
    for (std::size_t i = 1; i + 1 < m; ++i)
      y[i] = sub[i - 1] * x[i - 1] + diag[i] * x[i] + super[i] * x[i + 1];
    y[m - 1] = sub[m - 2] * x[m - 2] + diag[m - 1] * x[m - 1];
  }

  double max_abs_diag() const {
    double s = 0.0;
    for (double v : diag) s = std::max(s, std::abs(v));
    return s;
  }
};

// LU factors of a tridiagonal matrix with partial (row) pivoting; U carries a
// second superdiagonal created by row interchanges.
class TriLU {
 public:
  TriLU() = default;

  explicit TriLU(const TridiagonalMatrix& A) {
    A.validate();
    const std::size_t m = A.n();
    n_ = m;
    d_ = A.diag;
    du_ = A.super;
    dl_ = A.sub;
    du2_.assign(m > 2 ? m - 2 : 0, 0.0);
    ipiv_.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i) ipiv_[i] = i;

    double scale = A.max_abs_diag();
    if (scale == 0.0) {
      for (double v : A.sub) scale = std::max(scale, std::abs(v));
      for (double v : A.super) scale = std::max(scale, std::abs(v));
    }
    const double tiny = 1e-14 * scale;

    for (std::size_t i = 0; i + 1 < m; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        // No interchange.
        if (d_[i] != 0.0) {
          const double f = dl_[i] / d_[i];
          dl_[i] = f;
          d_[i + 1] -= f * du_[i];
        }
      } else {
        // Swap rows i and i+1.
        const double f = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = f;
        const double t = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = t - f * d_[i + 1];
        if (i + 2 < m) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -f * du_[i + 1];
        }
        ipiv_[i] = i + 1;
      }
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (!(std::abs(d_[i]) >= tiny) || d_[i] == 0.0)
        throw SingularOperatorError("thomas: singular pivot " + std::to_string(d_[i]) + " at row " +
                                    std::to_string(i));
    }
  }

  std::size_t n() const { return n_; }

  void solve_vec(double* b) const {
    const std::size_t m = n_;
    // L solve with interchanges.
    for (std::size_t i = 0; i + 1 < m; ++i) {
      if (ipiv_[i] == i) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const double t = b[i];
        b[i] = b[i + 1];
        b[i + 1] = t - dl_[i] * b[i + 1];
      }
    }
    // U solve.
    b[m - 1] /= d_[m - 1];
    if (m > 1) b[m - 2] = (b[m - 2] - du_[m - 2] * b[m - 1]) / d_[m - 2];
    if (m > 2)
      for (std::size_t k = m - 2; k-- > 0;) b[k] = (b[k] - du_[k] * b[k + 1] - du2_[k] * b[k + 2]) / d_[k];
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> d_, du_, du2_, dl_;
  std::vector<std::size_t> ipiv_;
};

inline TriLU tri_factor(const TridiagonalMatrix& A) { return TriLU(A); }

// Solves A X = rhs column-wise.
inline DenseMatrix thomas_solve(const TriLU& lu, const DenseMatrix& rhs) {
  if (rhs.rows() != lu.n()) throw Error("thomas_solve: dimension mismatch");
  DenseMatrix X = rhs;
  for (std::size_t j = 0; j < X.cols(); ++j) lu.solve_vec(X.col(j));
  return X;
}

}  // namespace arks
