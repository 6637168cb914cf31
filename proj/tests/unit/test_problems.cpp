#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "arks/oracle/dense_oracle.hpp"
#include "arks/problems.hpp"
#include "arks/solver/integrate.hpp"
#include "support/oracles.hpp"
#include "support/reference.hpp"

using namespace arks;
using namespace testing_support;

namespace {

constexpr double pi = std::numbers::pi;

// Closed forms written out directly from the problem definitions.
double phi_41(double x, double y) {
  auto g = [](double u) { return std::exp(-u * u); };
  return g(x - 0.3 * std::sin(x)) * g(y - 0.3 * std::cos(y)) +
         g(x - 0.6 * std::sin(pi * x)) * g(y - 0.6 * std::sin(pi * y)) +
         g(x - 0.6 * std::sin(2 * pi * x)) * g(y - 0.6 * std::sin(2 * pi * y));
}
double sigma_x_41(double x, double y) { return (1 - x * x) * 2 * y; }
double sigma_y_41(double x, double y) { return -2 * x * (1 - y * y); }

double f_42(double x, double y, double t) {
  return std::sin(pi * x) * std::sin(pi * y) * std::exp(-0.1 * pi * (t - 2) * (t - 2)) +
         std::sin(2 * pi * x) * std::sin(2 * pi * y) * std::exp(-0.5 * pi * (t - 10) * (t - 10)) +
         (std::exp(-100 * (x - 0.3) * (x - 0.3) - 100 * (y - 0.3) * (y - 0.3)) +
          std::exp(-100 * (x + 0.3) * (x + 0.3) - 100 * (y + 0.3) * (y + 0.3))) *
             std::exp(-0.5 * pi * (t - 15) * (t - 15));
}

double bump(double x) { return x * x * (1 - x) * (1 - x); }

// ∂x(φ ∂x f) + ∂y(φ ∂y f) − ∂x(σx f) − ∂y(σy f) by centered differences.
template <class F, class Phi, class Sx, class Sy>
double fd_operator(F f, Phi phi, Sx sx, Sy sy, double x, double y, double h) {
  const double dxx = (phi(x + h / 2, y) * (f(x + h, y) - f(x, y)) - phi(x - h / 2, y) * (f(x, y) - f(x - h, y))) / (h * h);
  const double dyy = (phi(x, y + h / 2) * (f(x, y + h) - f(x, y)) - phi(x, y - h / 2) * (f(x, y) - f(x, y - h))) / (h * h);
  const double ax = (sx(x + h, y) * f(x + h, y) - sx(x - h, y) * f(x - h, y)) / (2 * h);
  const double ay = (sy(x, y + h) * f(x, y + h) - sy(x, y - h) * f(x, y - h)) / (2 * h);
  return dxx + dyy - ax - ay;
}

double sample_coefficient(const std::vector<SeparablePair>& terms, double x, double y) {
  double s = 0.0;
  for (const auto& t : terms) s += t.x(x) * t.y(y);
  return s;
}

}  // namespace

TEST(Problems, RegistryListsAllExamples) {
  EXPECT_EQ(problem_ids().size(), 4u);
  for (const auto& id : problem_ids()) {
    const auto p = make_problem(id, 16);
    EXPECT_EQ(p.id, id);
    EXPECT_EQ(p.initial.rows(), 16u);
    EXPECT_NO_THROW(p.defaults.tolerances.validate()) << id;
    EXPECT_NO_THROW(ButcherTableau::by_name(p.defaults.integrator)) << id;
  }
  try {
    make_problem("ex99", 16);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("ex99"), std::string::npos);
  }
}

TEST(Problems, RotatingFlowCoefficientsMatchClosedForm) {
  const auto p = make_problem("ex41", 16);
  std::mt19937_64 rng(71);
  for (int i = 0; i < 50; ++i) {
    const double x = uniform(rng, -1, 1), y = uniform(rng, -1, 1);
    EXPECT_NEAR(sample_coefficient(p.coeffs.diffusion_x, x, y), phi_41(x, y), 1e-14);
    EXPECT_NEAR(sample_coefficient(p.coeffs.diffusion_y, x, y), phi_41(x, y), 1e-14);
    EXPECT_NEAR(sample_coefficient(p.coeffs.advection_x, x, y), sigma_x_41(x, y), 1e-14);
    EXPECT_NEAR(sample_coefficient(p.coeffs.advection_y, x, y), sigma_y_41(x, y), 1e-14);
  }
}

TEST(Problems, InitialConditionsMatchClosedForm) {
  const auto p41 = make_problem("ex41", 20);
  const auto p43 = make_problem("ex43", 20);
  const DenseMatrix F41 = densify(p41.initial), F43 = densify(p43.initial);
  const double a43 = 1.0 / (2 * 0.15 * 0.15);
  for (std::size_t i = 0; i < 20; ++i)
    for (std::size_t j = 0; j < 20; ++j) {
      const double x = p41.gx.node(i), y = p41.gy.node(j);
      auto two = [x, y](double a) {
        return 0.5 * std::exp(-a * ((x - 0.3) * (x - 0.3) + (y - 0.35) * (y - 0.35))) +
               0.8 * std::exp(-a * ((x - 0.65) * (x - 0.65) + (y - 0.5) * (y - 0.5)));
      };
      EXPECT_NEAR(F41(i, j), two(400.0), 1e-13);
      EXPECT_NEAR(F43(i, j), two(a43), 1e-13);
    }
  EXPECT_EQ(p41.initial.rank(), 2u);
  EXPECT_EQ(p43.initial.rank(), 2u);
  EXPECT_EQ(make_problem("ex44", 20).initial.rank(), 1u);
}

TEST(Problems, ManufacturedSolutionMatchesClosedForm) {
  const auto p = make_problem("ex42", 24);
  for (double t : {0.0, 1.0, 5.0, 10.0, 15.0, 18.0}) {
    const DenseMatrix F = densify(p.exact_at(t));
    double scale = 0.0;
    for (std::size_t k = 0; k < F.size(); ++k) scale = std::max(scale, std::abs(F.data()[k]));
    for (std::size_t i = 0; i < 24; ++i)
      for (std::size_t j = 0; j < 24; ++j)
        EXPECT_NEAR(F(i, j), f_42(p.gx.node(i), p.gy.node(j), t), 1e-12 * std::max(scale, 1e-300));
  }
}

TEST(Problems, ManufacturedSourceMatchesFiniteDifferences) {
  const auto p = make_problem("ex42", 16);
  std::mt19937_64 rng(72);
  for (int i = 0; i < 60; ++i) {
    const double x = uniform(rng, -0.95, 0.95), y = uniform(rng, -0.95, 0.95);
    const double t = uniform(rng, 0.0, 18.0);
    const double h = 1e-4;
    const double ft = (f_42(x, y, t + h) - f_42(x, y, t - h)) / (2 * h);
    auto f = [t](double a, double b) { return f_42(a, b, t); };
    const double Lf = fd_operator(f, phi_41, sigma_x_41, sigma_y_41, x, y, h);
    // Scale of the individual contributions, for a relative tolerance.
    const double scale = 1.0 + std::abs(ft) + std::abs(Lf);
    EXPECT_NEAR(evaluate_separable(p.source, x, y, t), ft - Lf, 1e-5 * scale) << x << " " << y << " " << t;
  }
}

TEST(Problems, SourceSamplingMatchesPointwiseEvaluation) {
  const auto p = make_problem("ex42", 12);
  const DenseMatrix S = densify(p.source_at(9.5));
  double scale = 0.0;
  for (std::size_t k = 0; k < S.size(); ++k) scale = std::max(scale, std::abs(S.data()[k]));
  for (std::size_t i = 0; i < 12; ++i)
    for (std::size_t j = 0; j < 12; ++j)
      EXPECT_NEAR(S(i, j), evaluate_separable(p.source, p.gx.node(i), p.gy.node(j), 9.5), 1e-12 * scale);
}

TEST(Problems, ManufacturedSnapshotRanks) {
  const std::size_t n = 64;
  const auto p = make_problem("ex42", n);
  auto dense_rank = [&](double t) {
    DenseMatrix F(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) F(i, j) = f_42(p.gx.node(i), p.gy.node(j), t);
    return oracle::epsilon_rank(F, 1e-5);
  };
  // Each additive term is separable; the two off-centre Gaussians are linearly independent.
  EXPECT_EQ(dense_rank(2.0), 1u);
  EXPECT_EQ(dense_rank(10.0), 1u);
  EXPECT_EQ(dense_rank(15.0), 2u);
  EXPECT_EQ(dense_rank(7.0), 2u);
  EXPECT_LE(dense_rank(12.5), 4u);
  for (double t : {2.0, 10.0, 15.0}) EXPECT_EQ(oracle::epsilon_rank(densify(p.exact_at(t)), 1e-5), dense_rank(t));
}

TEST(Problems, EquilibriumCoefficientsBalanceFlux) {
  const auto p = make_problem("ex44", 16);
  std::mt19937_64 rng(73);
  const double h = 1e-4;
  auto feq = [](double x, double y) { return bump(x) * bump(y); };
  auto phi = [](double x, double y) { return bump(x) * bump(y); };
  for (int i = 0; i < 40; ++i) {
    const double x = uniform(rng, 0.05, 0.95), y = uniform(rng, 0.05, 0.95);
    // σ = φ ∇ log f_eq.
    const double dlogx = (std::log(feq(x + h, y)) - std::log(feq(x - h, y))) / (2 * h);
    const double dlogy = (std::log(feq(x, y + h)) - std::log(feq(x, y - h))) / (2 * h);
    EXPECT_NEAR(sample_coefficient(p.coeffs.advection_x, x, y), phi(x, y) * dlogx, 1e-8);
    EXPECT_NEAR(sample_coefficient(p.coeffs.advection_y, x, y), phi(x, y) * dlogy, 1e-8);
    EXPECT_NEAR(sample_coefficient(p.coeffs.diffusion_x, x, y), phi(x, y), 1e-15);
    auto sx = [&p](double a, double b) { return sample_coefficient(p.coeffs.advection_x, a, b); };
    auto sy = [&p](double a, double b) { return sample_coefficient(p.coeffs.advection_y, a, b); };
    EXPECT_NEAR(fd_operator(feq, phi, sx, sy, x, y, 1e-3), 0.0, 1e-7);
  }
  ASSERT_TRUE(p.mass_target.has_value());
  double mass = 0.0;
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j) mass += feq(p.gx.node(i), p.gy.node(j));
  EXPECT_NEAR(*p.mass_target, p.gx.dx * p.gy.dx * mass, 1e-15);
}

TEST(Problems, DefaultTimeStepsFollowLambdaSpecifiers) {
  const auto p41 = make_problem("ex41", 300);
  const auto m = coefficient_maxima(p41.coeffs, p41.gx, p41.gy);
  EXPECT_NEAR(step_size(p41, p41.defaults.step_kind, p41.defaults.step_value),
              280.0 * p41.gx.dx * p41.gx.dx / m.phi_max, 1e-15);
  const auto p44 = make_problem("ex44", 32);
  EXPECT_DOUBLE_EQ(step_size(p44, p44.defaults.step_kind, p44.defaults.step_value), 1000.0);
  EXPECT_EQ(make_problem("ex43", 8).defaults.paper_n, 2100u);
}
