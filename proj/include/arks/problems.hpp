#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "arks/coefficients.hpp"
#include "arks/errors.hpp"
#include "arks/grid.hpp"
#include "arks/linalg/dense.hpp"
#include "arks/lowrank/lowrank_matrix.hpp"
#include "arks/solver/tolerances.hpp"

namespace arks {

// coef · x(x) · y(y) · time(t)
struct SeparableTerm {
  double coef = 1.0;
  Func1D x;
  Func1D y;
  Func1D time = Func1D::constant(1.0);
};

// Samples Σ terms at time t on the tensor grid and compresses to a LowRankMatrix.
inline LowRankMatrix sample_separable(const std::vector<SeparableTerm>& terms, const Grid1D& gx, const Grid1D& gy,
                                      double t, double eps_rel = 1e-14) {
  if (terms.empty()) return LowRankMatrix::zero(gx.n, gy.n);
  const std::size_t r = terms.size();
  DenseMatrix U(gx.n, r), V(gy.n, r), C(r, r);
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t i = 0; i < gx.n; ++i) U(i, k) = terms[k].x(gx.node(i));
    for (std::size_t j = 0; j < gy.n; ++j) V(j, k) = terms[k].y(gy.node(j));
    C(k, k) = terms[k].coef * terms[k].time(t);
  }
  return compress(U, C, V, eps_rel);
}

// Pointwise value of Σ terms.
inline double evaluate_separable(const std::vector<SeparableTerm>& terms, double x, double y, double t) {
  double s = 0.0;
  for (const auto& term : terms) s += term.coef * term.x(x) * term.y(y) * term.time(t);
  return s;
}

enum class StepSpec { dt, lambda_d, lambda_a };

struct ProblemDefaults {
  std::string integrator = "be";
  std::size_t n = 128;
  std::size_t paper_n = 128;
  double t_final = 1.0;
  StepSpec step_kind = StepSpec::dt;
  double step_value = 1e-2;
  Tolerances tolerances;
};

struct Problem {
  std::string id;
  Grid1D gx, gy;
  CoefficientSet coeffs;
  LowRankMatrix initial;
  std::vector<SeparableTerm> source;  // empty when the equation is homogeneous
  std::vector<SeparableTerm> exact;   // closed-form solution or steady state, if known
  std::optional<double> mass_target;  // rescale to this discrete mass after every step
  ProblemDefaults defaults;

  bool has_source() const { return !source.empty(); }
  LowRankMatrix source_at(double t) const { return sample_separable(source, gx, gy, t); }
  LowRankMatrix exact_at(double t) const { return sample_separable(exact, gx, gy, t); }
};

namespace functions {

inline Func1D make(std::function<double(double)> f, std::function<double(double)> df = {},
                   std::function<double(double)> d2f = {}) {
  return {std::move(f), std::move(df), std::move(d2f)};
}

inline Func1D polynomial(std::vector<double> c) {
  // c[0] + c[1] x + c[2] x² + …
  auto eval = [](const std::vector<double>& a, double x) {
    double s = 0.0;
    for (std::size_t k = a.size(); k-- > 0;) s = s * x + a[k];
    return s;
  };
  std::vector<double> d1, d2;
  for (std::size_t k = 1; k < c.size(); ++k) d1.push_back(static_cast<double>(k) * c[k]);
  for (std::size_t k = 1; k < d1.size(); ++k) d2.push_back(static_cast<double>(k) * d1[k]);
  return make([=](double x) { return eval(c, x); }, [=](double x) { return eval(d1, x); },
              [=](double x) { return eval(d2, x); });
}

// sin(kπx)
inline Func1D sine(double k) {
  const double w = k * std::numbers::pi;
  return make([w](double x) { return std::sin(w * x); }, [w](double x) { return w * std::cos(w * x); },
              [w](double x) { return -w * w * std::sin(w * x); });
}

// exp(−a (x − c)²)
inline Func1D gaussian(double a, double c) {
  return make([a, c](double x) { return std::exp(-a * (x - c) * (x - c)); },
              [a, c](double x) { return -2.0 * a * (x - c) * std::exp(-a * (x - c) * (x - c)); },
              [a, c](double x) {
                const double z = x - c;
                return (4.0 * a * a * z * z - 2.0 * a) * std::exp(-a * z * z);
              });
}

// exp(−(x − c·s(x))²) with s, s', s'' supplied.
inline Func1D shifted_gaussian(double c, std::function<double(double)> s, std::function<double(double)> ds,
                               std::function<double(double)> d2s) {
  auto u = [c, s](double x) { return x - c * s(x); };
  auto du = [c, ds](double x) { return 1.0 - c * ds(x); };
  auto d2u = [c, d2s](double x) { return -c * d2s(x); };
  return make([u](double x) { return std::exp(-u(x) * u(x)); },
              [u, du](double x) { return -2.0 * u(x) * du(x) * std::exp(-u(x) * u(x)); },
              [u, du, d2u](double x) {
                const double a = u(x), b = du(x);
                return (4.0 * a * a * b * b - 2.0 * b * b - 2.0 * a * d2u(x)) * std::exp(-a * a);
              });
}

// exp(−a π (t − t0)²) as a function of time.
inline Func1D time_pulse(double a, double t0) {
  const double k = a * std::numbers::pi;
  return make([k, t0](double t) { return std::exp(-k * (t - t0) * (t - t0)); },
              [k, t0](double t) { return -2.0 * k * (t - t0) * std::exp(-k * (t - t0) * (t - t0)); });
}

// Product f·g with derivatives.
inline Func1D product(const Func1D& f, const Func1D& g) {
  return make([f, g](double x) { return f(x) * g(x); },
              [f, g](double x) { return f.d(x) * g(x) + f(x) * g.d(x); },
              [f, g](double x) { return f.d2(x) * g(x) + 2.0 * f.d(x) * g.d(x) + f(x) * g.d2(x); });
}

}  // namespace functions

namespace detail {

// Rank-3 diffusion factors shared by the first two examples.
inline std::vector<SeparablePair> exp_sine_diffusion() {
  using functions::shifted_gaussian;
  const double pi = std::numbers::pi;
  auto sin1 = [](double x) { return std::sin(x); };
  auto dsin1 = [](double x) { return std::cos(x); };
  auto d2sin1 = [](double x) { return -std::sin(x); };
  auto cos1 = [](double x) { return std::cos(x); };
  auto dcos1 = [](double x) { return -std::sin(x); };
  auto d2cos1 = [](double x) { return -std::cos(x); };
  auto sink = [pi](double k) {
    return std::function<double(double)>([pi, k](double x) { return std::sin(k * pi * x); });
  };
  auto dsink = [pi](double k) {
    return std::function<double(double)>([pi, k](double x) { return k * pi * std::cos(k * pi * x); });
  };
  auto d2sink = [pi](double k) {
    return std::function<double(double)>([pi, k](double x) { return -k * k * pi * pi * std::sin(k * pi * x); });
  };
  return {
      {shifted_gaussian(0.3, sin1, dsin1, d2sin1), shifted_gaussian(0.3, cos1, dcos1, d2cos1)},
      {shifted_gaussian(0.6, sink(1), dsink(1), d2sink(1)), shifted_gaussian(0.6, sink(1), dsink(1), d2sink(1))},
      {shifted_gaussian(0.6, sink(2), dsink(2), d2sink(2)), shifted_gaussian(0.6, sink(2), dsink(2), d2sink(2))},
  };
}

inline CoefficientSet rotating_flow_coefficients() {
  using functions::polynomial;
  CoefficientSet c;
  c.diffusion_x = exp_sine_diffusion();
  c.diffusion_y = exp_sine_diffusion();
  c.advection_x = {{polynomial({1.0, 0.0, -1.0}), polynomial({0.0, 2.0})}};
  c.advection_y = {{polynomial({0.0, -2.0}), polynomial({1.0, 0.0, -1.0})}};
  return c;
}

inline std::vector<SeparableTerm> two_gaussians(double a) {
  using functions::gaussian;
  return {{0.5, gaussian(a, 0.3), gaussian(a, 0.35), Func1D::constant(1.0)},
          {0.8, gaussian(a, 0.65), gaussian(a, 0.5), Func1D::constant(1.0)}};
}

// Source f_t − 𝓛f for f = Σ a(x) b(y) τ(t), expanded term by term:
// (φ¹ a′)′ φ² b for diffusion in x, φ¹ a (φ² b′)′ for diffusion in y,
// −(σ¹ a)′ σ² b and −σ¹ a (σ² b)′ for advection.
inline std::vector<SeparableTerm> manufactured_source(const std::vector<SeparableTerm>& solution,
                                                      const CoefficientSet& c) {
  using functions::make;
  std::vector<SeparableTerm> out;
  for (const auto& f : solution) {
    const Func1D& a = f.x;
    const Func1D& b = f.y;
    const Func1D& tau = f.time;
    const Func1D dtau = make([tau](double t) { return tau.d(t); });
    out.push_back({f.coef, a, b, dtau});
    for (const auto& p : c.diffusion_x) {
      const Func1D phi = p.x;
      const Func1D xf = make([phi, a](double x) { return phi.d(x) * a.d(x) + phi(x) * a.d2(x); });
      out.push_back({-f.coef, xf, functions::product(p.y, b), tau});
    }
    for (const auto& p : c.diffusion_y) {
      const Func1D phi = p.y;
      const Func1D yf = make([phi, b](double y) { return phi.d(y) * b.d(y) + phi(y) * b.d2(y); });
      out.push_back({-f.coef, functions::product(p.x, a), yf, tau});
    }
    for (const auto& p : c.advection_x) {
      const Func1D sig = p.x;
      const Func1D xf = make([sig, a](double x) { return sig.d(x) * a(x) + sig(x) * a.d(x); });
      out.push_back({f.coef, xf, functions::product(p.y, b), tau});
    }
    for (const auto& p : c.advection_y) {
      const Func1D sig = p.y;
      const Func1D yf = make([sig, b](double y) { return sig.d(y) * b(y) + sig(y) * b.d(y); });
      out.push_back({f.coef, functions::product(p.x, a), yf, tau});
    }
  }
  return out;
}

}  // namespace detail

// Advection-diffusion with rank-1 rotating advection and rank-3 diffusion on [−1, 1]².
inline Problem make_ex41(std::size_t n) {
  Problem p;
  p.id = "ex41";
  p.gx = Grid1D(n, -1.0, 1.0);
  p.gy = Grid1D(n, -1.0, 1.0);
  p.coeffs = detail::rotating_flow_coefficients();
  p.initial = sample_separable(detail::two_gaussians(400.0), p.gx, p.gy, 0.0);
  p.defaults.integrator = "dirk2";
  p.defaults.n = 300;
  p.defaults.paper_n = 300;
  p.defaults.t_final = 0.5;
  p.defaults.step_kind = StepSpec::lambda_d;
  p.defaults.step_value = 280.0;
  p.defaults.tolerances = {1e-4, 1e-6, 1e-8, 1e-8, 20, 500};
  return p;
}

// Manufactured solution with a time-dependent source, same coefficients as ex41.
inline Problem make_ex42(std::size_t n) {
  using functions::gaussian;
  using functions::sine;
  using functions::time_pulse;
  Problem p;
  p.id = "ex42";
  p.gx = Grid1D(n, -1.0, 1.0);
  p.gy = Grid1D(n, -1.0, 1.0);
  p.coeffs = detail::rotating_flow_coefficients();
  p.exact = {
      {1.0, sine(1.0), sine(1.0), time_pulse(0.1, 2.0)},
      {1.0, sine(2.0), sine(2.0), time_pulse(0.5, 10.0)},
      {1.0, gaussian(100.0, 0.3), gaussian(100.0, 0.3), time_pulse(0.5, 15.0)},
      {1.0, gaussian(100.0, -0.3), gaussian(100.0, -0.3), time_pulse(0.5, 15.0)},
  };
  p.source = detail::manufactured_source(p.exact, p.coeffs);
  p.initial = p.exact_at(0.0);
  p.defaults.integrator = "be";
  p.defaults.n = 256;
  p.defaults.paper_n = 1000;
  p.defaults.t_final = 18.0;
  p.defaults.step_kind = StepSpec::lambda_d;
  p.defaults.step_value = 1300.0;
  p.defaults.tolerances = {2e-3, 1e-5, 1e-5, 1e-12, 20, 500};
  return p;
}

// Swirling deformation flow with weak diffusion ν = 1e-3 on [−1, 1]².
inline Problem make_ex43(std::size_t n) {
  using functions::polynomial;
  Problem p;
  p.id = "ex43";
  p.gx = Grid1D(n, -1.0, 1.0);
  p.gy = Grid1D(n, -1.0, 1.0);
  const double nu = 1e-3;
  p.coeffs.diffusion_x = {{Func1D::constant(nu), Func1D::constant(1.0)}};
  p.coeffs.diffusion_y = {{Func1D::constant(1.0), Func1D::constant(nu)}};
  p.coeffs.advection_x = {{polynomial({-1.0, 0.0, 1.0}), polynomial({0.0, 2.0})}};
  p.coeffs.advection_y = {{polynomial({0.0, 2.0}), polynomial({1.0, 0.0, -1.0})}};
  const double s = 0.15;
  p.initial = sample_separable(detail::two_gaussians(1.0 / (2.0 * s * s)), p.gx, p.gy, 0.0);
  p.defaults.integrator = "dirk3";
  p.defaults.n = 512;
  p.defaults.paper_n = 2100;
  p.defaults.t_final = 10.0;
  p.defaults.step_kind = StepSpec::lambda_a;
  p.defaults.step_value = 7.0;
  p.defaults.tolerances = {2e-3, 1e-6, 1e-5, 1e-10, 20, 500};
  return p;
}

// Coefficients balanced against f_eq = x²(1−x)² y²(1−y)² on [0, 1]².
inline Problem make_ex44(std::size_t n) {
  using functions::polynomial;
  Problem p;
  p.id = "ex44";
  p.gx = Grid1D(n, 0.0, 1.0);
  p.gy = Grid1D(n, 0.0, 1.0);
  const Func1D bump = polynomial({0.0, 0.0, 1.0, -2.0, 1.0});    // x²(1−x)²
  const Func1D drift = polynomial({0.0, 2.0, -6.0, 4.0});        // 2x(1−3x+2x²)
  p.coeffs.diffusion_x = {{bump, bump}};
  p.coeffs.diffusion_y = {{bump, bump}};
  p.coeffs.advection_x = {{drift, bump}};
  p.coeffs.advection_y = {{bump, drift}};
  p.exact = {{1.0, bump, bump, Func1D::constant(1.0)}};
  const Func1D absin = functions::make([](double x) { return std::abs(std::sin(2.0 * std::numbers::pi * x)); });
  p.initial = sample_separable({{1.0, absin, absin, Func1D::constant(1.0)}}, p.gx, p.gy, 0.0);
  p.mass_target = p.gx.dx * p.gy.dx * entry_sum(p.exact_at(0.0));
  p.defaults.integrator = "be";
  p.defaults.n = 128;
  p.defaults.paper_n = 128;
  p.defaults.t_final = 20000.0;
  p.defaults.step_kind = StepSpec::dt;
  p.defaults.step_value = 1000.0;
  p.defaults.tolerances = {1e-3, 0.0, 1e-8, 1e-10, 20, 500};
  return p;
}

inline Problem make_problem(const std::string& id, std::size_t n) {
  if (id == "ex41") return make_ex41(n);
  if (id == "ex42") return make_ex42(n);
  if (id == "ex43") return make_ex43(n);
  if (id == "ex44") return make_ex44(n);
  throw ConfigError("unknown example '" + id + "' (expected ex41, ex42, ex43 or ex44)");
}

inline const std::vector<std::string>& problem_ids() {
  static const std::vector<std::string> ids{"ex41", "ex42", "ex43", "ex44"};
  return ids;
}

}  // namespace arks
