#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "arks/coefficients.hpp"
#include "arks/errors.hpp"
#include "arks/lowrank/lowrank_matrix.hpp"
#include "arks/operators.hpp"
#include "arks/problems.hpp"
#include "arks/solver/butcher.hpp"
#include "arks/solver/step.hpp"
#include "arks/solver/tolerances.hpp"

namespace arks {

// A step failed; carries the reports of the steps completed before it.
struct IntegrationError : Error {
  IntegrationError(const std::string& what, std::vector<StepReport> partial)
      : Error(what), reports(std::move(partial)) {}

  std::vector<StepReport> reports;
};

struct IntegrationResult {
  LowRankMatrix F;
  double t = 0.0;
  std::vector<StepReport> reports;
};

using StepObserver = std::function<void(const StepReport&, const LowRankMatrix&)>;

// Δt from λ_D = Δt φ_max/Δx² or λ_A = Δt σ_max/Δx, with Δx taken from the x grid.
inline double step_size(const Problem& p, StepSpec kind, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw ConfigError("time step specifier must be positive");
  const auto m = coefficient_maxima(p.coeffs, p.gx, p.gy);
  const double dx = p.gx.dx;
  switch (kind) {
    case StepSpec::dt:
      return value;
    case StepSpec::lambda_d:
      if (!(m.phi_max > 0.0)) throw ConfigError("lambda_d requires a nonzero diffusion coefficient");
      return value * dx * dx / m.phi_max;
    case StepSpec::lambda_a:
      if (!(m.sigma_max > 0.0)) throw ConfigError("lambda_a requires a nonzero advection coefficient");
      return value * dx / m.sigma_max;
  }
  throw ConfigError("unknown time step specifier");
}

// Fixed-step time loop; the last step is shortened to land on t_final.
inline IntegrationResult integrate(const Problem& problem, const ButcherTableau& tab, double t_final, double dt,
                                   const Tolerances& tols, const StepObserver& observer = {}) {
  tab.validate();
  tols.validate();
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("integrate: dt must be positive");
  if (!(t_final >= 0.0)) throw ConfigError("integrate: t_final must be non-negative");

  IntegrationResult out;
  out.F = problem.initial;
  if (t_final == 0.0) return out;

  const auto maxima = coefficient_maxima(problem.coeffs, problem.gx, problem.gy);
  const double dx = problem.gx.dx;
  const double add = tab.diagonal();

  double ops_dt = dt;
  OperatorSet ops = assemble_operator_set(problem.gx, problem.gy, problem.coeffs, add * dt);
  std::size_t step = 0;
  const double t_tol = 1e-12 * std::max(1.0, t_final);
  while (out.t < t_final - t_tol) {
    double next = static_cast<double>(step + 1) * dt;
    if (next > t_final - t_tol) next = t_final;
    const double h = next - out.t;
    if (std::abs(h - ops_dt) > 1e-10 * dt) {
      ops = assemble_operator_set(problem.gx, problem.gy, problem.coeffs, add * h);
      ops_dt = h;
    }
    std::vector<LowRankMatrix> sources;
    if (problem.has_source())
      for (double c : tab.c) sources.push_back(problem.source_at(out.t + c * h));
    StepResult r;
    try {
      r = adaptive_dirk_step(out.F, ops, tab, tols, sources);
    } catch (const Error& e) {
      throw IntegrationError("integrate: step " + std::to_string(step + 1) + " at t = " + std::to_string(out.t) +
                                 " failed: " + e.what(),
                             out.reports);
    }
    out.F = std::move(r.F);
    if (problem.mass_target) out.F = mass_rescale(out.F, *problem.mass_target, problem.gx.dx, problem.gy.dx);
    out.t = next;
    ++step;
    r.report.t = out.t;
    r.report.lambda_d = h * maxima.phi_max / (dx * dx);
    r.report.lambda_a = h * maxima.sigma_max / dx;
    out.reports.push_back(r.report);
    if (observer) observer(out.reports.back(), out.F);
  }
  return out;
}

}  // namespace arks
