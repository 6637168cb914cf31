#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#ifdef ARKS_USE_CBLAS
#include <cblas.h>
#endif

#include "arks/errors.hpp"

namespace arks {

// Column-major dense matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  // Row-wise literal, convenient for small fixed matrices.
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t m = rows.size();
    const std::size_t n = m ? rows.begin()->size() : 0;
    DenseMatrix a(m, n);
    std::size_t i = 0;
    for (const auto& r : rows) {
      if (r.size() != n) throw Error("from_rows: ragged initializer");
      std::size_t j = 0;
      for (double v : r) a(i, j++) = v;
      ++i;
    }
    return a;
  }

  static DenseMatrix column(std::span<const double> v) {
    DenseMatrix a(v.size(), 1);
    std::copy(v.begin(), v.end(), a.data());
    return a;
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
    return a;
  }

  static DenseMatrix diagonal(std::span<const double> d) {
    DenseMatrix a(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) a(i, i) = d[i];
    return a;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) {
    assert(i < rows_ && j < cols_);
    return data_[j * rows_ + i];
  }
  double operator()(std::size_t i, std::size_t j) const {
    assert(i < rows_ && j < cols_);
    return data_[j * rows_ + i];
  }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* col(std::size_t j) { return data_.data() + j * rows_; }
  const double* col(std::size_t j) const { return data_.data() + j * rows_; }
  std::span<double> col_span(std::size_t j) { return {col(j), rows_}; }
  std::span<const double> col_span(std::size_t j) const { return {col(j), rows_}; }

  std::vector<double>& storage() { return data_; }
  const std::vector<double>& storage() const { return data_; }

  DenseMatrix cols_range(std::size_t j0, std::size_t count) const {
    assert(j0 + count <= cols_);
    DenseMatrix a(rows_, count);
    std::copy(col(j0), col(j0) + rows_ * count, a.data());
    return a;
  }

  DenseMatrix block(std::size_t i0, std::size_t j0, std::size_t m, std::size_t n) const {
    assert(i0 + m <= rows_ && j0 + n <= cols_);
    DenseMatrix a(m, n);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < m; ++i) a(i, j) = (*this)(i0 + i, j0 + j);
    return a;
  }

  void set_block(std::size_t i0, std::size_t j0, const DenseMatrix& b) {
    assert(i0 + b.rows() <= rows_ && j0 + b.cols() <= cols_);
    for (std::size_t j = 0; j < b.cols(); ++j)
      for (std::size_t i = 0; i < b.rows(); ++i) (*this)(i0 + i, j0 + j) = b(i, j);
  }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t j = 0; j < cols_; ++j)
      for (std::size_t i = 0; i < rows_; ++i) t(j, i) = (*this)(i, j);
    return t;
  }

  DenseMatrix& operator+=(const DenseMatrix& b) {
    check_same(b);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += b.data_[k];
    return *this;
  }
  DenseMatrix& operator-=(const DenseMatrix& b) {
    check_same(b);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= b.data_[k];
    return *this;
  }
  DenseMatrix& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  // this += s * b
  void axpy(double s, const DenseMatrix& b) {
    check_same(b);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += s * b.data_[k];
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

 private:
  void check_same(const DenseMatrix& b) const {
    if (b.rows_ != rows_ || b.cols_ != cols_) throw Error("DenseMatrix: dimension mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
inline DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
inline DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

// Four partial sums keep the loop vectorizable with a fixed reduction order.
inline double dot(const double* x, const double* y, std::size_t n) {
  double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  for (; i < n; ++i) s0 += x[i] * y[i];
  return (s0 + s1) + (s2 + s3);
}

inline void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

// Frobenius inner product.
inline double inner(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error("inner: dimension mismatch");
  return dot(a.data(), b.data(), a.size());
}

inline double frobenius_norm(const DenseMatrix& a) {
  // Scaled accumulation avoids overflow for extreme entries.
  double scale = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) scale = std::max(scale, std::abs(a.data()[k]));
  if (scale == 0.0 || !std::isfinite(scale)) return scale;
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double v = a.data()[k] / scale;
    s += v * v;
  }
  return scale * std::sqrt(s);
}

inline double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.data()[k]));
  return m;
}

enum class Trans { N, T };

#ifdef ARKS_USE_CBLAS
namespace detail {
// Products below this many multiply-adds stay on the inline loops.
inline constexpr double kBlasMinWork = 32768.0;
}  // namespace detail
#endif

// C = alpha * op(A) * op(B) + beta * C
inline void gemm(Trans ta, Trans tb, double alpha, const DenseMatrix& A, const DenseMatrix& B,
                 double beta, DenseMatrix& C) {
  const std::size_t m = ta == Trans::N ? A.rows() : A.cols();
  const std::size_t k = ta == Trans::N ? A.cols() : A.rows();
  const std::size_t kb = tb == Trans::N ? B.rows() : B.cols();
  const std::size_t n = tb == Trans::N ? B.cols() : B.rows();
  if (k != kb) throw Error("gemm: inner dimension mismatch");
  if (C.rows() != m || C.cols() != n) {
    if (beta != 0.0) throw Error("gemm: output dimension mismatch");
    C = DenseMatrix(m, n);
  } else if (beta == 0.0) {
    std::fill(C.data(), C.data() + C.size(), 0.0);
  } else if (beta != 1.0) {
    C *= beta;
  }
  if (m == 0 || n == 0 || k == 0) return;

#ifdef ARKS_USE_CBLAS
  if (static_cast<double>(m) * static_cast<double>(n) * static_cast<double>(k) >= detail::kBlasMinWork) {
    cblas_dgemm(CblasColMajor, ta == Trans::N ? CblasNoTrans : CblasTrans, tb == Trans::N ? CblasNoTrans : CblasTrans,
                static_cast<int>(m), static_cast<int>(n), static_cast<int>(k), alpha, A.data(),
                static_cast<int>(A.rows()), B.data(), static_cast<int>(B.rows()), 1.0, C.data(), static_cast<int>(m));
    return;
  }
#endif

  if (ta == Trans::N && tb == Trans::N) {
    for (std::size_t j = 0; j < n; ++j) {
      double* cj = C.col(j);
      for (std::size_t p = 0; p < k; ++p) {
        const double b = alpha * B(p, j);
        if (b != 0.0) axpy(b, A.col(p), cj, m);
      }
    }
  } else if (ta == Trans::T && tb == Trans::N) {
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < m; ++i) C(i, j) += alpha * dot(A.col(i), B.col(j), k);
  } else if (ta == Trans::N && tb == Trans::T) {
    for (std::size_t p = 0; p < k; ++p) {
      const double* ap = A.col(p);
      for (std::size_t j = 0; j < n; ++j) {
        const double b = alpha * B(j, p);
        if (b != 0.0) axpy(b, ap, C.col(j), m);
      }
    }
  } else {
    const DenseMatrix At = A.transpose();
    gemm(Trans::N, Trans::T, alpha, At, B, 1.0, C);
  }
}

inline DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B) {
  DenseMatrix C;
  gemm(Trans::N, Trans::N, 1.0, A, B, 0.0, C);
  return C;
}

// Aᵀ B
inline DenseMatrix matmul_tn(const DenseMatrix& A, const DenseMatrix& B) {
  DenseMatrix C;
  gemm(Trans::T, Trans::N, 1.0, A, B, 0.0, C);
  return C;
}

// A Bᵀ
inline DenseMatrix matmul_nt(const DenseMatrix& A, const DenseMatrix& B) {
  DenseMatrix C;
  gemm(Trans::N, Trans::T, 1.0, A, B, 0.0, C);
  return C;
}

// diag(d) * A
inline DenseMatrix scale_rows(std::span<const double> d, const DenseMatrix& A) {
  if (d.size() != A.rows()) throw Error("scale_rows: dimension mismatch");
  DenseMatrix B(A.rows(), A.cols());
  for (std::size_t j = 0; j < A.cols(); ++j) {
    const double* a = A.col(j);
    double* b = B.col(j);
    for (std::size_t i = 0; i < A.rows(); ++i) b[i] = d[i] * a[i];
  }
  return B;
}

inline DenseMatrix hcat(std::span<const DenseMatrix> blocks) {
  if (blocks.empty()) return {};
  const std::size_t m = blocks.front().rows();
  std::size_t n = 0;
  for (const auto& b : blocks) {
    if (b.rows() != m) throw Error("hcat: row count mismatch");
    n += b.cols();
  }
  DenseMatrix out(m, n);
  std::size_t off = 0;
  for (const auto& b : blocks) {
    std::copy(b.data(), b.data() + b.size(), out.col(off));
    off += b.cols();
  }
  return out;
}

inline DenseMatrix block_diag(std::span<const DenseMatrix> blocks) {
  std::size_t m = 0, n = 0;
  for (const auto& b : blocks) {
    m += b.rows();
    n += b.cols();
  }
  DenseMatrix out(m, n);
  std::size_t i0 = 0, j0 = 0;
  for (const auto& b : blocks) {
    out.set_block(i0, j0, b);
    i0 += b.rows();
    j0 += b.cols();
  }
  return out;
}

// ‖QᵀQ − I‖_F
inline double orthogonality_error(const DenseMatrix& Q) {
  DenseMatrix G = matmul_tn(Q, Q);
  for (std::size_t i = 0; i < G.rows(); ++i) G(i, i) -= 1.0;
  return frobenius_norm(G);
}

}  // namespace arks
