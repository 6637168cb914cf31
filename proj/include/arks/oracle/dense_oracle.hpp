#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "arks/errors.hpp"
#include "arks/linalg/dense.hpp"
#include "arks/linalg/kron.hpp"
#include "arks/linalg/svd.hpp"
#include "arks/linalg/tridiagonal.hpp"
#include "arks/lowrank/lowrank_matrix.hpp"
#include "arks/operators.hpp"
#include "arks/solver/butcher.hpp"

// Dense reference computations. Not used by any solver path.
namespace arks::oracle {

inline constexpr std::size_t kMaxDenseUnknowns = 16384;

inline DenseMatrix to_dense(const LowRankMatrix& F) {
  F.validate();
  if (F.S.size() == 0) return DenseMatrix(F.rows(), F.cols());
  return matmul_nt(matmul(F.U, F.S), F.V);
}

inline DenseMatrix to_dense(const TridiagonalMatrix& T) {
  const std::size_t n = T.diag.size();
  DenseMatrix A(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    A(i, i) = T.diag[i];
    if (i + 1 < n) {
      A(i + 1, i) = T.sub[i];
      A(i, i + 1) = T.super[i];
    }
  }
  return A;
}

inline DenseMatrix to_dense(const Op1D& op) {
  if (op.tri) return to_dense(*op.tri);
  return DenseMatrix::diagonal(*op.diag);
}

// 𝓛(F) = Σ left·F·rightᵀ evaluated on a dense F.
inline DenseMatrix apply_operator(const OperatorSet& ops, const DenseMatrix& F) {
  if (F.rows() != ops.n1() || F.cols() != ops.n2()) throw Error("apply_operator: dimension mismatch");
  DenseMatrix out(F.rows(), F.cols());
  for (const auto& t : ops.terms()) {
    const DenseMatrix LF = t.left.apply(F);
    out += t.right.apply(LF.transpose()).transpose();
  }
  return out;
}

// ‖F1 − dt·𝓛(F1) − B‖_F
inline double dense_residual_norm(const OperatorSet& ops, const DenseMatrix& F1, const DenseMatrix& B, double dt) {
  DenseMatrix R = F1 - B;
  R.axpy(-dt, apply_operator(ops, F1));
  return frobenius_norm(R);
}

// LU with partial pivoting.
class DenseLU {
 public:
  explicit DenseLU(DenseMatrix A) : lu_(std::move(A)), piv_(lu_.rows()) {
    const std::size_t n = lu_.rows();
    if (lu_.cols() != n) throw Error("DenseLU: matrix must be square");
    double scale = 0.0;
    for (std::size_t k = 0; k < lu_.size(); ++k) scale = std::max(scale, std::abs(lu_.data()[k]));
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t p = c;
      for (std::size_t r = c + 1; r < n; ++r)
        if (std::abs(lu_(r, c)) > std::abs(lu_(p, c))) p = r;
      piv_[c] = p;
      if (!(std::abs(lu_(p, c)) > 1e-14 * scale)) throw SingularOperatorError("DenseLU: singular matrix");
      if (p != c)
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(c, j), lu_(p, j));
      const double inv = 1.0 / lu_(c, c);
      for (std::size_t r = c + 1; r < n; ++r) lu_(r, c) *= inv;
      for (std::size_t j = c + 1; j < n; ++j) {
        const double u = lu_(c, j);
        if (u == 0.0) continue;
        double* col = lu_.col(j);
        const double* l = lu_.col(c);
        for (std::size_t r = c + 1; r < n; ++r) col[r] -= l[r] * u;
      }
    }
  }

  DenseMatrix solve(DenseMatrix B) const {
    const std::size_t n = lu_.rows();
    if (B.rows() != n) throw Error("DenseLU: right-hand side size mismatch");
    for (std::size_t j = 0; j < B.cols(); ++j) {
      double* b = B.col(j);
      for (std::size_t c = 0; c < n; ++c) std::swap(b[c], b[piv_[c]]);
      for (std::size_t c = 0; c < n; ++c) {
        const double* l = lu_.col(c);
        for (std::size_t r = c + 1; r < n; ++r) b[r] -= l[r] * b[c];
      }
      for (std::size_t c = n; c-- > 0;) {
        b[c] /= lu_(c, c);
        const double* u = lu_.col(c);
        for (std::size_t r = 0; r < c; ++r) b[r] -= u[r] * b[c];
      }
    }
    return B;
  }

 private:
  DenseMatrix lu_;
  std::vector<std::size_t> piv_;
};

// Kronecker form 𝒦 = Σ right ⊗ left, acting on column-stacked vec(F).
inline DenseMatrix kronecker_operator(const OperatorSet& ops) {
  const std::size_t n1 = ops.n1(), n2 = ops.n2();
  DenseMatrix K(n1 * n2, n1 * n2);
  for (const auto& t : ops.terms()) K += kron(to_dense(t.right), to_dense(t.left));
  return K;
}

struct DenseProblem {
  std::size_t n1 = 0, n2 = 0;
  DenseMatrix K;
  DenseMatrix F0;
};

inline DenseProblem make_dense_problem(const OperatorSet& ops, const DenseMatrix& F0) {
  const std::size_t n1 = ops.n1(), n2 = ops.n2();
  if (n1 * n2 > kMaxDenseUnknowns) {
    std::ostringstream os;
    os << "DenseProblem: " << n1 << "x" << n2 << " exceeds the dense size guard of " << kMaxDenseUnknowns
       << " unknowns";
    throw ConfigError(os.str());
  }
  if (F0.rows() != n1 || F0.cols() != n2) throw Error("DenseProblem: F0 does not match the grid");
  return {n1, n2, kronecker_operator(ops), F0};
}

inline DenseProblem make_dense_problem(const OperatorSet& ops, const LowRankMatrix& F0) {
  return make_dense_problem(ops, to_dense(F0));
}

namespace detail {

inline DenseMatrix shifted_system(const DenseProblem& p, double dt) {
  DenseMatrix A = (-dt) * p.K;
  for (std::size_t i = 0; i < A.rows(); ++i) A(i, i) += 1.0;
  return A;
}

}  // namespace detail

// Solves F1 − dt·𝓛(F1) = B with B = F0 + dt·source.
inline DenseMatrix dense_step(const DenseProblem& p, double dt, const DenseMatrix* source = nullptr) {
  DenseMatrix B = p.F0;
  if (source) B.axpy(dt, *source);
  if (dt == 0.0) return B;
  const DenseLU lu(detail::shifted_system(p, dt));
  return unvec(lu.solve(vec(B)), p.n1, p.n2);
}

// Stage-by-stage dense DIRK step; sources, if given, are evaluated at the stage times.
inline DenseMatrix dense_dirk_step(const DenseProblem& p, const ButcherTableau& tab, double dt,
                                   const std::vector<DenseMatrix>& sources = {},
                                   std::vector<DenseMatrix>* stages_out = nullptr) {
  tab.validate();
  const std::size_t s = tab.stages();
  if (!sources.empty() && sources.size() != s) throw ConfigError("dense_dirk_step: one source per stage is required");
  std::vector<DenseMatrix> F(s), Y(s);
  const double akk = tab.diagonal();
  std::optional<DenseLU> lu;
  if (dt != 0.0) lu.emplace(detail::shifted_system(p, akk * dt));
  for (std::size_t k = 0; k < s; ++k) {
    DenseMatrix B = p.F0;
    for (std::size_t l = 0; l < k; ++l) B.axpy(dt * tab.a[k][l], Y[l]);
    if (!sources.empty()) B.axpy(akk * dt, sources[k]);
    if (dt == 0.0) {
      F[k] = B;
      Y[k] = DenseMatrix(p.n1, p.n2);
      continue;
    }
    F[k] = unvec(lu->solve(vec(B)), p.n1, p.n2);
    // Y_k = 𝓛(F_k) + S_k = (F_k − B_k)/(a_kk dt) + S_k
    Y[k] = (1.0 / (akk * dt)) * (F[k] - B);
    if (!sources.empty()) Y[k] += sources[k];
  }
  if (stages_out) *stages_out = F;
  return F[s - 1];
}

// Number of σ_j with σ_j/σ_1 > eps.
inline std::size_t epsilon_rank(const DenseMatrix& F, double eps) {
  if (F.size() == 0) return 0;
  const auto svd = dense_svd(F);
  if (svd.sigma.empty() || svd.sigma[0] == 0.0) return 0;
  std::size_t r = 0;
  while (r < svd.sigma.size() && svd.sigma[r] / svd.sigma[0] > eps) ++r;
  return r;
}

// Full-rank backward Euler on grids too large for DenseProblem: banded LU of
// I − dt·𝒦 (bandwidth N1 in column-stacked ordering) without pivoting.
// Intended for diagonally dominant systems such as diffusion-dominated problems.
class BandedBackwardEuler {
 public:
  BandedBackwardEuler(const OperatorSet& ops, double dt) : n1_(ops.n1()), n2_(ops.n2()), bw_(ops.n1()) {
    n_ = n1_ * n2_;
    w_ = 2 * bw_ + 1;
    band_.assign(n_ * w_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) at(i, i) = 1.0;
    for (const auto& t : ops.terms()) {
      if (t.left.tri && t.right.diag) {
        const auto& T = *t.left.tri;
        const auto& d = *t.right.diag;
        for (std::size_t j = 0; j < n2_; ++j)
          for (std::size_t i = 0; i < n1_; ++i) {
            const std::size_t r = i + n1_ * j;
            at(r, r) -= dt * d[j] * T.diag[i];
            if (i > 0) at(r, r - 1) -= dt * d[j] * T.sub[i - 1];
            if (i + 1 < n1_) at(r, r + 1) -= dt * d[j] * T.super[i];
          }
      } else if (t.left.diag && t.right.tri) {
        const auto& d = *t.left.diag;
        const auto& T = *t.right.tri;
        for (std::size_t j = 0; j < n2_; ++j)
          for (std::size_t i = 0; i < n1_; ++i) {
            const std::size_t r = i + n1_ * j;
            at(r, r) -= dt * d[i] * T.diag[j];
            if (j > 0) at(r, r - n1_) -= dt * d[i] * T.sub[j - 1];
            if (j + 1 < n2_) at(r, r + n1_) -= dt * d[i] * T.super[j];
          }
      } else {
        throw Error("BandedBackwardEuler: unsupported term structure");
      }
    }
    factor();
  }

  // Solves F1 − dt·𝓛(F1) = B.
  DenseMatrix solve(const DenseMatrix& B) const {
    if (B.rows() != n1_ || B.cols() != n2_) throw Error("BandedBackwardEuler: dimension mismatch");
    std::vector<double> x(B.data(), B.data() + n_);
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t end = std::min(n_, k + bw_ + 1);
      for (std::size_t i = k + 1; i < end; ++i) x[i] -= get(i, k) * x[k];
    }
    for (std::size_t k = n_; k-- > 0;) {
      const std::size_t end = std::min(n_, k + bw_ + 1);
      double s = x[k];
      for (std::size_t j = k + 1; j < end; ++j) s -= get(k, j) * x[j];
      x[k] = s / get(k, k);
    }
    DenseMatrix F(n1_, n2_);
    std::copy(x.begin(), x.end(), F.data());
    return F;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return band_[i * w_ + (j + bw_ - i)]; }
  double get(std::size_t i, std::size_t j) const { return band_[i * w_ + (j + bw_ - i)]; }

  void factor() {
    double scale = 0.0;
    for (double v : band_) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < n_; ++k) {
      const double piv = get(k, k);
      if (!(std::abs(piv) > 1e-14 * scale)) throw SingularOperatorError("BandedBackwardEuler: zero pivot");
      const std::size_t end = std::min(n_, k + bw_ + 1);
      const double* rowk = &band_[k * w_ + bw_];  // entries (k, k..k+bw)
      for (std::size_t i = k + 1; i < end; ++i) {
        double& lik = at(i, k);
        if (lik == 0.0) continue;
        lik /= piv;
        const double l = lik;
        double* rowi = &band_[i * w_ + (k + bw_ - i)];  // entries (i, k..)
        for (std::size_t j = 1; j < end - k; ++j) rowi[j] -= l * rowk[j];
      }
    }
  }

  std::size_t n1_, n2_, bw_, n_ = 0, w_ = 0;
  std::vector<double> band_;
};

}  // namespace arks::oracle
