#pragma once

#include <cstddef>

#include "arks/linalg/dense.hpp"

namespace arks {

inline DenseMatrix kron(const DenseMatrix& A, const DenseMatrix& B) {
  const std::size_t ma = A.rows(), na = A.cols(), mb = B.rows(), nb = B.cols();
  DenseMatrix K(ma * mb, na * nb);
  for (std::size_t ja = 0; ja < na; ++ja)
    for (std::size_t jb = 0; jb < nb; ++jb)
      for (std::size_t ia = 0; ia < ma; ++ia) {
        const double a = A(ia, ja);
        for (std::size_t ib = 0; ib < mb; ++ib) K(ia * mb + ib, ja * nb + jb) = a * B(ib, jb);
      }
  return K;
}

// Column-stacking vec as an n·m × 1 matrix.
inline DenseMatrix vec(const DenseMatrix& F) {
  DenseMatrix v(F.size(), 1);
  std::copy(F.data(), F.data() + F.size(), v.data());
  return v;
}

inline DenseMatrix unvec(const DenseMatrix& v, std::size_t rows, std::size_t cols) {
  if (v.size() != rows * cols) throw Error("unvec: size mismatch");
  DenseMatrix F(rows, cols);
  std::copy(v.data(), v.data() + v.size(), F.data());
  return F;
}

}  // namespace arks
