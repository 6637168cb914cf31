#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <vector>

#include "arks/errors.hpp"
#include "arks/linalg/dense.hpp"
#include "arks/lowrank/krylov.hpp"
#include "arks/lowrank/lowrank_matrix.hpp"
#include "arks/lowrank/residual.hpp"
#include "arks/lowrank/truncation.hpp"
#include "arks/operators.hpp"
#include "arks/solver/butcher.hpp"
#include "arks/solver/gmres.hpp"
#include "arks/solver/reduced_system.hpp"
#include "arks/solver/tolerances.hpp"

namespace arks {

struct StepReport {
  double t = 0.0;  // time at the end of the step
  double dt = 0.0;
  std::size_t rank_before_trunc = 0;
  std::size_t rank_after_trunc = 0;
  std::size_t basis_size_x = 0;
  std::size_t basis_size_y = 0;
  std::size_t krylov_iters = 0;
  std::vector<std::size_t> gmres_iters;  // per stage, accepted iteration
  double residual = 0.0;                 // relative residual of the accepted solution
  double wall_time = 0.0;
  double lambda_d = 0.0;
  double lambda_a = 0.0;

  std::size_t total_gmres_iters() const {
    std::size_t s = 0;
    for (auto k : gmres_iters) s += k;
    return s;
  }
};

struct StepResult {
  LowRankMatrix F;
  StepReport report;
};

// State of the accepted outer iteration, exposed for diagnostics and studies.
struct StepInternals {
  DenseMatrix U1, V1;                 // untruncated bases
  std::vector<DenseMatrix> B_stages;  // projected stage right-hand sides
  std::vector<DenseMatrix> S_stages;  // stage solutions in the untruncated bases
};

namespace detail {

inline DenseMatrix project_core(const DenseMatrix& U1, const DenseMatrix& V1, const LowRankMatrix& F) {
  if (F.S.size() == 0) return DenseMatrix(U1.cols(), V1.cols());
  return matmul_nt(matmul(matmul_tn(U1, F.U), F.S), matmul_tn(V1, F.V));
}

}  // namespace detail

// Adaptive-rank step of an s-stage DIRK scheme (backward Euler when s = 1).
// stage_sources, when non-empty, holds the source term at each stage time.
inline StepResult adaptive_dirk_step(const LowRankMatrix& F0, const OperatorSet& ops, const ButcherTableau& tab,
                                     const Tolerances& tols, const std::vector<LowRankMatrix>& stage_sources = {},
                                     StepInternals* internals = nullptr) {
  const auto start = std::chrono::steady_clock::now();
  tab.validate();
  tols.validate();
  F0.validate();
  const std::size_t s = tab.stages();
  const double add = tab.diagonal();
  const double dt = ops.dt_diag / add;
  if (!stage_sources.empty() && stage_sources.size() != s)
    throw ConfigError("dirk_step: one source per stage is required");
  if (F0.rows() != ops.n1() || F0.cols() != ops.n2()) throw Error("dirk_step: F0 does not match the grid");

  StepResult result;
  StepReport& rep = result.report;
  rep.dt = dt;

  // Starting blocks: range of F0 and of every stage source.
  std::vector<DenseMatrix> ublocks{F0.U}, vblocks{F0.V};
  double source_norm = 0.0;
  for (const auto& src : stage_sources) {
    ublocks.push_back(src.U);
    vblocks.push_back(src.V);
    source_norm += src.frobenius_norm();
  }
  const double f0_norm = F0.frobenius_norm();
  if (f0_norm == 0.0 && source_norm == 0.0) {
    result.F = LowRankMatrix::zero(ops.n1(), ops.n2());
    rep.krylov_iters = 1;
    rep.gmres_iters.assign(s, 0);
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
  }
  const DenseMatrix U0 = svd_truncated_qr(ublocks, 1e-14);
  const DenseMatrix V0 = svd_truncated_qr(vblocks, 1e-14);

  const auto xops = krylov_operators_x(ops);
  const auto yops = krylov_operators_y(ops);
  KrylovBasis bx = krylov_start(U0, xops.size());
  KrylovBasis by = krylov_start(V0, yops.size());

  double last_residual = 0.0;
  for (std::size_t m = 1; m <= tols.max_iter; ++m) {
    krylov_augment(bx, xops, tols.eps_kappa);
    krylov_augment(by, yops, tols.eps_kappa);
    const DenseMatrix& U1 = bx.Q;
    const DenseMatrix& V1 = by.Q;

    const DenseMatrix F0t = detail::project_core(U1, V1, F0);
    std::vector<DenseMatrix> src_t;
    for (const auto& src : stage_sources) src_t.push_back(detail::project_core(U1, V1, src));

    ReducedSystem sys = build_reduced_system(U1, V1, ops, DenseMatrix(U1.cols(), V1.cols()));
    std::vector<DenseMatrix> Bk(s), Sk(s);
    std::vector<std::size_t> iters(s, 0);
    for (std::size_t k = 0; k < s; ++k) {
      DenseMatrix B = F0t;
      for (std::size_t l = 0; l < k; ++l) {
        const double akl = tab.a[k][l];
        if (akl == 0.0) continue;
        B.axpy(akl / tab.a[l][l], Sk[l] - Bk[l]);
        if (!src_t.empty()) B.axpy(akl * dt, src_t[l]);
      }
      if (!src_t.empty()) B.axpy(tab.a[k][k] * dt, src_t[k]);
      sys.B = B;
      const GmresResult g = gmres_solve(sys, tols.eps_gmres, tols.gmres_max_iter);
      Bk[k] = std::move(B);
      Sk[k] = g.x;
      iters[k] = g.iterations;
    }

    const LowRankMatrix F1{U1, Sk[s - 1], V1};
    TruncationResult tr = truncated_svd(F1, tols.eps);
    const double res = lowrank_residual_norm(tr.F, U1, Bk[s - 1], V1, ops, ops.dt_diag);
    const double ref = f0_norm > 0.0 ? f0_norm : frobenius_norm(Bk[s - 1]);
    last_residual = ref > 0.0 ? res / ref : res;

    rep.krylov_iters = m;
    rep.basis_size_x = U1.cols();
    rep.basis_size_y = V1.cols();
    rep.rank_before_trunc = std::min(U1.cols(), V1.cols());
    rep.rank_after_trunc = tr.F.rank();
    rep.gmres_iters = iters;
    rep.residual = last_residual;
    if (last_residual < tols.eps_tol) {
      if (internals) {
        internals->U1 = U1;
        internals->V1 = V1;
        internals->B_stages = std::move(Bk);
        internals->S_stages = std::move(Sk);
      }
      result.F = std::move(tr.F);
      rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      return result;
    }
  }
  std::ostringstream os;
  os << "adaptive step: residual " << last_residual << " above eps_tol " << tols.eps_tol << " after "
     << tols.max_iter << " basis augmentations";
  throw ConvergenceError(os.str(), {last_residual});
}

// Backward Euler: ops assembled with dt_diag = Δt. The source, if given, is S(t + Δt).
inline StepResult backward_euler_step(const LowRankMatrix& F0, const OperatorSet& ops, const Tolerances& tols,
                                      const LowRankMatrix* source = nullptr, StepInternals* internals = nullptr) {
  std::vector<LowRankMatrix> src;
  if (source) src.push_back(*source);
  return adaptive_dirk_step(F0, ops, ButcherTableau::backward_euler(), tols, src, internals);
}

// ops assembled with dt_diag = a_kk Δt.
inline StepResult dirk_step(const LowRankMatrix& F0, const OperatorSet& ops, const ButcherTableau& tab,
                            const Tolerances& tols, const std::vector<LowRankMatrix>& stage_sources = {},
                            StepInternals* internals = nullptr) {
  return adaptive_dirk_step(F0, ops, tab, tols, stage_sources, internals);
}

// Scales F so that dx·dy·Σ F_ij equals target_mass.
inline LowRankMatrix mass_rescale(const LowRankMatrix& F, double target_mass, double dx, double dy) {
  const double mass = dx * dy * entry_sum(F);
  if (mass == 0.0 || !std::isfinite(mass)) throw Error("mass_rescale: current mass is zero");
  LowRankMatrix out = F;
  out.S *= target_mass / mass;
  return out;
}

}  // namespace arks
