#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "arks/bench/config.hpp"
#include "arks/errors.hpp"
#include "arks/lowrank/krylov.hpp"
#include "arks/lowrank/lowrank_matrix.hpp"
#include "arks/problems.hpp"
#include "arks/solver/gmres.hpp"
#include "arks/solver/integrate.hpp"
#include "arks/solver/reduced_system.hpp"
#include "arks/solver/step.hpp"

namespace arks::bench {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw Error("median of an empty sample");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("loglog_slope: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

// Δx Δy Σ|A − B|, formed in column blocks so the full grid is never stored.
inline double l1_difference(const LowRankMatrix& A, const LowRankMatrix& B, double dx, double dy) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) throw Error("l1_difference: shape mismatch");
  const DenseMatrix US_a = A.rank() ? matmul(A.U, A.S) : DenseMatrix(A.rows(), 0);
  const DenseMatrix US_b = B.rank() ? matmul(B.U, B.S) : DenseMatrix(B.rows(), 0);
  const std::size_t n2 = A.cols(), block = 256;
  double sum = 0.0;
  for (std::size_t j0 = 0; j0 < n2; j0 += block) {
    const std::size_t m = std::min(block, n2 - j0);
    DenseMatrix D(A.rows(), m);
    if (US_a.cols()) D += matmul_nt(US_a, A.V.block(j0, 0, m, A.V.cols()));
    if (US_b.cols()) D -= matmul_nt(US_b, B.V.block(j0, 0, m, B.V.cols()));
    for (std::size_t k = 0; k < D.size(); ++k) sum += std::abs(D.data()[k]);
  }
  return dx * dy * sum;
}

inline ButcherTableau tableau(const RunConfig& c) { return ButcherTableau::by_name(c.integrator); }

inline double lambda_d_of(const Problem& p, double dt) {
  return dt * coefficient_maxima(p.coeffs, p.gx, p.gy).phi_max / (p.gx.dx * p.gx.dx);
}

struct RunOutcome {
  IntegrationResult result;
  double dt = 0.0;
  double wall_time = 0.0;
  std::size_t max_rank = 0;
  std::optional<double> l1_error;  // against the closed-form solution or steady state
};

inline RunOutcome run_experiment(const RunConfig& c, const StepObserver& observer = {}) {
  c.validate();
  const Problem p = make_problem(c.example, c.n);
  RunOutcome out;
  out.dt = step_size(p, c.step_kind, c.step_value);
  const auto start = Clock::now();
  out.result = integrate(p, tableau(c), c.t_final, out.dt, c.tolerances, observer);
  out.wall_time = seconds_since(start);
  out.max_rank = p.initial.rank();
  for (const auto& r : out.result.reports) out.max_rank = std::max(out.max_rank, r.rank_after_trunc);
  if (!p.exact.empty()) out.l1_error = l1_difference(out.result.F, p.exact_at(out.result.t), p.gx.dx, p.gy.dx);
  return out;
}

struct ConvergencePoint {
  double dt = 0.0;
  double lambda_d = 0.0;
  double l1_error = 0.0;
  std::optional<double> observed_order;
};

// Errors against a run with dt_ref = min(dt)/4, orders between consecutive step sizes.
inline std::vector<ConvergencePoint> convergence_study(const RunConfig& c, std::vector<double> dts) {
  c.validate();
  if (dts.size() < 3) throw ConfigError("converge: need at least 3 time steps");
  std::sort(dts.begin(), dts.end(), std::greater<>());
  for (std::size_t i = 0; i < dts.size(); ++i) {
    if (!(dts[i] > 0.0) || !std::isfinite(dts[i])) throw ConfigError("converge: time steps must be positive");
    if (i && dts[i] == dts[i - 1]) throw ConfigError("converge: dt values must be distinct");
  }
  const Problem p = make_problem(c.example, c.n);
  const ButcherTableau tab = tableau(c);
  const double dt_ref = dts.back() / 4.0;
  const LowRankMatrix ref = integrate(p, tab, c.t_final, dt_ref, c.tolerances).F;
  std::vector<ConvergencePoint> out;
  for (double dt : dts) {
    ConvergencePoint pt;
    pt.dt = dt;
    pt.lambda_d = lambda_d_of(p, dt);
    pt.l1_error = l1_difference(integrate(p, tab, c.t_final, dt, c.tolerances).F, ref, p.gx.dx, p.gy.dx);
    if (!out.empty() && pt.l1_error > 0.0 && out.back().l1_error > 0.0)
      pt.observed_order = std::log(out.back().l1_error / pt.l1_error) / std::log(out.back().dt / dt);
    out.push_back(pt);
  }
  return out;
}

struct ComplexityPoint {
  std::size_t n = 0;
  double dt = 0.0;
  double wall_time = 0.0;  // median over repetitions
  std::size_t max_rank = 0;
};

// Wall time of `steps` steps per grid size.
inline std::vector<ComplexityPoint> complexity_study(const RunConfig& c, const std::vector<std::size_t>& ns,
                                                     std::size_t reps, std::size_t steps) {
  c.validate();
  if (ns.size() < 4) throw ConfigError("complexity: need ≥ 4 points");
  if (reps == 0 || steps == 0) throw ConfigError("complexity: repetitions and steps must be positive");
  std::vector<ComplexityPoint> out;
  for (std::size_t n : ns) {
    const Problem p = make_problem(c.example, n);
    ComplexityPoint pt;
    pt.n = n;
    pt.dt = step_size(p, c.step_kind, c.step_value);
    std::vector<double> times;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto start = Clock::now();
      const auto res = integrate(p, tableau(c), static_cast<double>(steps) * pt.dt, pt.dt, c.tolerances);
      times.push_back(seconds_since(start));
      for (const auto& rep : res.reports) pt.max_rank = std::max(pt.max_rank, rep.rank_after_trunc);
    }
    pt.wall_time = median(times);
    out.push_back(pt);
  }
  return out;
}

struct RankScanPoint {
  std::size_t rank = 0;
  std::size_t iterations = 0;
  double solve_time = 0.0;  // median over repetitions
};

// Grows untruncated Krylov bases from the initial condition and times one
// preconditioned reduced solve per augmentation count.
inline std::vector<RankScanPoint> rank_scan(const RunConfig& c, std::size_t augmentations, std::size_t reps) {
  c.validate();
  if (augmentations == 0 || reps == 0) throw ConfigError("rank scan: augmentations and repetitions must be positive");
  const Problem p = make_problem(c.example, c.n);
  const double dt = step_size(p, c.step_kind, c.step_value);
  const OperatorSet ops = assemble_operator_set(p.gx, p.gy, p.coeffs, dt);
  const auto xops = krylov_operators_x(ops);
  const auto yops = krylov_operators_y(ops);
  KrylovBasis bx = krylov_start(p.initial.U, xops.size());
  KrylovBasis by = krylov_start(p.initial.V, yops.size());
  std::vector<RankScanPoint> out;
  for (std::size_t m = 1; m <= augmentations; ++m) {
    krylov_augment(bx, xops, 0.0);
    krylov_augment(by, yops, 0.0);
    const DenseMatrix B = matmul_nt(matmul(matmul_tn(bx.Q, p.initial.U), p.initial.S), matmul_tn(by.Q, p.initial.V));
    const ReducedSystem sys = build_reduced_system(bx.Q, by.Q, ops, B);
    RankScanPoint pt;
    pt.rank = std::min(bx.size(), by.size());
    std::vector<double> times;
    for (std::size_t r = 0; r < reps; ++r) {
      const auto start = Clock::now();
      const GmresResult g = gmres_solve(sys, c.tolerances.eps_gmres, c.tolerances.gmres_max_iter);
      times.push_back(seconds_since(start));
      pt.iterations = g.iterations;
    }
    pt.solve_time = median(times);
    out.push_back(pt);
  }
  return out;
}

struct GmresHistory {
  std::size_t n = 0;
  bool preconditioned = false;
  std::vector<double> residuals;  // relative residual per iteration, starting at 1
  bool converged = false;
  std::size_t iterations() const { return residuals.empty() ? 0 : residuals.size() - 1; }
};

// One backward Euler step per grid size; the accepted reduced system is then
// solved again with and without the preconditioner.
inline std::vector<GmresHistory> gmres_study(const RunConfig& c, const std::vector<std::size_t>& ns,
                                             std::size_t max_iter) {
  c.validate();
  if (ns.empty()) throw ConfigError("gmres-study: the list of grid sizes is empty");
  std::vector<GmresHistory> out;
  for (std::size_t n : ns) {
    const Problem p = make_problem(c.example, n);
    const double dt = step_size(p, c.step_kind, c.step_value);
    const OperatorSet ops = assemble_operator_set(p.gx, p.gy, p.coeffs, dt);
    StepInternals in;
    std::optional<LowRankMatrix> src;
    if (p.has_source()) src = p.source_at(dt);
    backward_euler_step(p.initial, ops, c.tolerances, src ? &*src : nullptr, &in);
    const ReducedSystem sys = build_reduced_system(in.U1, in.V1, ops, in.B_stages.front());
    const MatrixMap A = [&sys](const DenseMatrix& S) { return reduced_apply(sys, S); };
    const MatrixMap M = [&sys](const DenseMatrix& Z) { return acs_precondition(sys, Z); };
    const MatrixMap I = [](const DenseMatrix& Z) { return Z; };
    for (bool pre : {true, false}) {
      const GmresResult g = gmres(A, pre ? M : I, sys.B, c.tolerances.eps_gmres, max_iter);
      out.push_back({n, pre, g.history, g.converged});
    }
  }
  return out;
}

}  // namespace arks::bench
