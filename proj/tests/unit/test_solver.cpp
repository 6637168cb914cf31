#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "arks/lowrank/krylov.hpp"
#include "arks/problems.hpp"
#include "arks/solver/butcher.hpp"
#include "arks/solver/gmres.hpp"
#include "arks/solver/integrate.hpp"
#include "arks/solver/reduced_system.hpp"
#include "arks/solver/step.hpp"
#include "arks/solver/tolerances.hpp"
#include "support/oracles.hpp"
#include "support/reference.hpp"

using namespace arks;
using namespace testing_support;

namespace {

Tolerances tight() {
  Tolerances t;
  t.eps_tol = 1e-10;
  t.eps_kappa = 1e-12;
  t.eps = 1e-13;
  t.eps_gmres = 1e-13;
  return t;
}

double relative_error(const DenseMatrix& a, const DenseMatrix& ref) { return frob_diff(a, ref) / frob(ref); }

// Σ_l b_l c_l^p and Σ_{k,l} b_k a_kl c_l.
double moment(const ButcherTableau& t, int p) {
  double s = 0.0;
  for (std::size_t l = 0; l < t.stages(); ++l) s += t.b[l] * std::pow(t.c[l], p);
  return s;
}

double bac(const ButcherTableau& t) {
  double s = 0.0;
  for (std::size_t k = 0; k < t.stages(); ++k)
    for (std::size_t l = 0; l < t.stages(); ++l) s += t.b[k] * t.a[k][l] * t.c[l];
  return s;
}

struct Setup {
  OperatorSet ops;
  DenseMatrix K;
};

Setup random_setup(std::mt19937_64& rng, std::size_t n1, std::size_t n2, double dt_diag) {
  const Grid1D gx(n1, -1.0, 1.0), gy(n2, -1.0, 1.0);
  const auto c = random_coefficients(rng, uniform_int(rng, 1, 2), uniform_int(rng, 1, 2), uniform_int(rng, 0, 1),
                                     uniform_int(rng, 0, 1));
  Setup s{assemble_operator_set(gx, gy, c, dt_diag), {}};
  s.K = reference_kronecker(s.ops);
  return s;
}

}  // namespace

TEST(Butcher, TableauxValidateAndAreStifflyAccurate) {
  for (const auto& name : {"be", "dirk2", "dirk3"}) {
    const auto t = ButcherTableau::by_name(name);
    EXPECT_NO_THROW(t.validate());
    EXPECT_EQ(t.c.back(), 1.0);
    for (std::size_t l = 0; l < t.stages(); ++l) EXPECT_EQ(t.b[l], t.a.back()[l]);
  }
  EXPECT_THROW(ButcherTableau::by_name("rk4"), ConfigError);
}

TEST(Butcher, OrderConditions) {
  const auto be = ButcherTableau::backward_euler();
  EXPECT_NEAR(moment(be, 0), 1.0, 1e-15);
  const auto d2 = ButcherTableau::dirk2();
  EXPECT_NEAR(moment(d2, 0), 1.0, 1e-15);
  EXPECT_NEAR(moment(d2, 1), 0.5, 1e-15);
  const auto d3 = ButcherTableau::dirk3();
  EXPECT_NEAR(moment(d3, 0), 1.0, 1e-14);
  EXPECT_NEAR(moment(d3, 1), 0.5, 1e-9);
  EXPECT_NEAR(moment(d3, 2), 1.0 / 3.0, 1e-9);
  EXPECT_NEAR(bac(d3), 1.0 / 6.0, 1e-9);
}

TEST(Butcher, MalformedTableauxAreRejected) {
  auto t = ButcherTableau::dirk2();
  t.a[1][1] = 0.5;
  EXPECT_THROW(t.validate(), ConfigError);
  t = ButcherTableau::dirk2();
  t.a[0][1] = 0.1;
  EXPECT_THROW(t.validate(), ConfigError);
  t = ButcherTableau::dirk2();
  t.b[0] += 0.1;
  EXPECT_THROW(t.validate(), ConfigError);
}

TEST(Tolerances, DefaultsValidate) { EXPECT_NO_THROW(Tolerances{}.validate()); }

TEST(Tolerances, OrderingConstraintsAreEnforced) {
  Tolerances t;
  t.eps_gmres = t.eps_tol;
  try {
    t.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("eps_gmres"), std::string::npos);
  }
  t = Tolerances{};
  t.eps = 1e-2 * t.eps_tol;
  EXPECT_THROW(t.validate(), ConfigError);
  t = Tolerances{};
  t.eps_tol = 0.0;
  EXPECT_THROW(t.validate(), ConfigError);
}

TEST(ReducedSystem, ApplyMatchesProjectedKronecker) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n1 = uniform_int(rng, 6, 14), n2 = uniform_int(rng, 6, 14);
    const double dt = uniform(rng, 1e-3, 1e-1);
    const auto s = random_setup(rng, n1, n2, dt);
    const auto U = orthonormal_span(random_matrix(n1, 4, rng)), V = orthonormal_span(random_matrix(n2, 3, rng));
    const auto sys = build_reduced_system(U, V, s.ops, DenseMatrix(4, 3));
    const auto S = random_matrix(4, 3, rng);
    // U (sys S) Vᵀ equals the Galerkin projection of (I − dt K) applied to U S Vᵀ.
    const DenseMatrix F = naive_product(naive_product(U, S), V.transpose());
    DenseMatrix full = F;
    const DenseMatrix KF = reference_apply(s.K, F);
    for (std::size_t k = 0; k < full.size(); ++k) full.data()[k] -= dt * KF.data()[k];
    const DenseMatrix ref = naive_product(naive_product(U.transpose(), full), V);
    EXPECT_LT(frob_diff(reduced_apply(sys, S), ref), 1e-12 * frob(ref));
  }
}

TEST(ReducedSystem, PreconditionerSolvesSylvesterEquation) {
  std::mt19937_64 rng(32);
  const auto s = random_setup(rng, 20, 18, 0.05);
  const auto U = orthonormal_span(random_matrix(20, 5, rng)), V = orthonormal_span(random_matrix(18, 4, rng));
  const auto sys = build_reduced_system(U, V, s.ops, DenseMatrix(5, 4));
  const auto Zhat = random_matrix(5, 4, rng);
  const auto Z = acs_precondition(sys, Zhat);
  DenseMatrix lhs = naive_product(sys.P1, Z);
  const DenseMatrix zp = naive_product(Z, sys.P2.transpose());
  for (std::size_t k = 0; k < lhs.size(); ++k) lhs.data()[k] += zp.data()[k];
  EXPECT_LT(frob_diff(lhs, Zhat), 1e-12 * frob(Zhat));
}

TEST(Gmres, ZeroRightHandSideNeedsNoIterations) {
  std::mt19937_64 rng(33);
  const auto s = random_setup(rng, 12, 12, 0.05);
  const auto U = orthonormal_span(random_matrix(12, 3, rng));
  const auto sys = build_reduced_system(U, U, s.ops, DenseMatrix(3, 3));
  const auto g = gmres_solve(sys, 1e-10, 50);
  EXPECT_EQ(g.iterations, 0u);
  EXPECT_EQ(frob(g.x), 0.0);
}

TEST(Gmres, ConstantCoefficientsMakeThePreconditionerExact) {
  const Grid1D g(30, -1.0, 1.0);
  CoefficientSet c;
  c.diffusion_x = {{Func1D::constant(1.0), Func1D::constant(1.0)}};
  c.diffusion_y = {{Func1D::constant(1.0), Func1D::constant(1.0)}};
  const auto ops = assemble_operator_set(g, g, c, 0.01);
  std::mt19937_64 rng(34);
  const auto U = orthonormal_span(random_matrix(30, 6, rng)), V = orthonormal_span(random_matrix(30, 5, rng));
  auto sys = build_reduced_system(U, V, ops, random_matrix(6, 5, rng));
  const auto res = gmres_solve(sys, 1e-12, 50);
  EXPECT_LE(res.iterations, 2u);
  const DenseMatrix r = reduced_apply(sys, res.x);
  EXPECT_LT(frob_diff(r, sys.B), 1e-10 * frob(sys.B));
}

TEST(Gmres, RandomReducedSystemMatchesDirectSolve) {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 10; ++trial) {
    const auto s = random_setup(rng, 24, 24, uniform(rng, 1e-3, 5e-2));
    const auto U = orthonormal_span(random_matrix(24, 6, rng)), V = orthonormal_span(random_matrix(24, 6, rng));
    auto sys = build_reduced_system(U, V, s.ops, random_matrix(6, 6, rng));
    const auto res = gmres_solve(sys, 1e-13, 200);
    // Dense matrix of the reduced operator, column by column.
    DenseMatrix A(36, 36);
    for (std::size_t j = 0; j < 36; ++j) {
      DenseMatrix e(6, 6);
      e.data()[j] = 1.0;
      const DenseMatrix col = column_stack(reduced_apply(sys, e));
      for (std::size_t i = 0; i < 36; ++i) A(i, j) = col(i, 0);
    }
    const DenseMatrix ref = column_unstack(gauss_solve(A, column_stack(sys.B)), 6, 6);
    EXPECT_LT(relative_error(res.x, ref), 1e-10);
    EXPECT_GE(res.history.size(), res.iterations + 1);
    EXPECT_EQ(res.history.front(), 1.0);
  }
}

TEST(Gmres, IterationCapRaisesWithHistory) {
  std::mt19937_64 rng(36);
  const auto s = random_setup(rng, 24, 24, 0.5);
  const auto U = orthonormal_span(random_matrix(24, 8, rng)), V = orthonormal_span(random_matrix(24, 8, rng));
  auto sys = build_reduced_system(U, V, s.ops, random_matrix(8, 8, rng));
  try {
    gmres_solve(sys, 1e-14, 2, false);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.residual_history.size(), 3u);
    EXPECT_GT(e.residual_history.back(), 1e-14);
  }
}

TEST(AdaptiveStep, ZeroInitialDataStaysZero) {
  std::mt19937_64 rng(37);
  const auto s = random_setup(rng, 16, 16, 0.01);
  const auto r = backward_euler_step(LowRankMatrix::zero(16, 16), s.ops, Tolerances{});
  EXPECT_EQ(r.F.rank(), 0u);
  EXPECT_EQ(r.report.krylov_iters, 1u);
  EXPECT_EQ(r.F.rows(), 16u);
}

TEST(AdaptiveStep, TinyStepReturnsInitialData) {
  std::mt19937_64 rng(38);
  const auto s = random_setup(rng, 20, 20, 1e-12);
  const auto F0 = random_lowrank(20, 20, 3, rng);
  Tolerances tols;
  tols.eps_tol = 1e-6;
  tols.eps = 1e-9;
  tols.eps_gmres = 1e-10;
  const auto r = backward_euler_step(F0, s.ops, tols);
  EXPECT_LT(relative_error(densify(r.F), densify(F0)), 1e-8);
  EXPECT_EQ(r.F.rank(), 3u);
}

TEST(AdaptiveStep, BackwardEulerMatchesKroneckerSolve) {
  std::mt19937_64 rng(39);
  for (int trial = 0; trial < 5; ++trial) {
    const double dt = uniform(rng, 1e-3, 2e-2);
    const auto s = random_setup(rng, 32, 28, dt);
    const auto F0 = random_lowrank(32, 28, uniform_int(rng, 1, 3), rng);
    const auto r = backward_euler_step(F0, s.ops, tight());
    const DenseMatrix ref = reference_shifted_solve(s.K, dt, densify(F0));
    EXPECT_LT(relative_error(densify(r.F), ref), 1e-8);
    EXPECT_LT(r.report.residual, 1e-10);
    EXPECT_LE(r.report.rank_after_trunc, std::min(r.report.basis_size_x, r.report.basis_size_y));
    EXPECT_EQ(r.report.gmres_iters.size(), 1u);
  }
}

TEST(AdaptiveStep, BackwardEulerWithSource) {
  std::mt19937_64 rng(40);
  const double dt = 0.01;
  const auto s = random_setup(rng, 24, 24, dt);
  const auto F0 = random_lowrank(24, 24, 2, rng);
  const auto src = random_lowrank(24, 24, 2, rng);
  const auto r = backward_euler_step(F0, s.ops, tight(), &src);
  DenseMatrix B = densify(F0);
  const DenseMatrix sd = densify(src);
  for (std::size_t k = 0; k < B.size(); ++k) B.data()[k] += dt * sd.data()[k];
  EXPECT_LT(relative_error(densify(r.F), reference_shifted_solve(s.K, dt, B)), 1e-8);
}

TEST(AdaptiveStep, SingleStageDirkIsBackwardEuler) {
  std::mt19937_64 rng(41);
  const auto s = random_setup(rng, 20, 20, 0.02);
  const auto F0 = random_lowrank(20, 20, 2, rng);
  const auto a = backward_euler_step(F0, s.ops, tight());
  const auto b = dirk_step(F0, s.ops, ButcherTableau::backward_euler(), tight());
  EXPECT_EQ(frob_diff(densify(a.F), densify(b.F)), 0.0);
  EXPECT_EQ(a.report.krylov_iters, b.report.krylov_iters);
}

TEST(AdaptiveStep, DirkSchemesMatchStageByStageReference) {
  std::mt19937_64 rng(42);
  for (const auto& name : {"dirk2", "dirk3"}) {
    const auto tab = ButcherTableau::by_name(name);
    const double dt = 0.02;
    const auto s = random_setup(rng, 24, 22, tab.diagonal() * dt);
    const auto F0 = random_lowrank(24, 22, 2, rng);
    std::vector<LowRankMatrix> src;
    std::vector<DenseMatrix> src_d;
    for (std::size_t k = 0; k < tab.stages(); ++k) {
      src.push_back(random_lowrank(24, 22, 1, rng));
      src_d.push_back(densify(src.back()));
    }
    const auto r = dirk_step(F0, s.ops, tab, tight(), src);
    const DenseMatrix ref = reference_dirk_step(s.K, tab, dt, densify(F0), src_d);
    EXPECT_LT(relative_error(densify(r.F), ref), 1e-8) << name;
    EXPECT_EQ(r.report.gmres_iters.size(), tab.stages());
    EXPECT_NEAR(r.report.dt, dt, 1e-15);
  }
}

TEST(AdaptiveStep, SourceCountMustMatchStages) {
  std::mt19937_64 rng(43);
  const auto s = random_setup(rng, 12, 12, 0.01);
  const auto F0 = random_lowrank(12, 12, 1, rng);
  EXPECT_THROW(dirk_step(F0, s.ops, ButcherTableau::dirk2(), Tolerances{}, {F0}), ConfigError);
  EXPECT_THROW(backward_euler_step(random_lowrank(10, 12, 1, rng), s.ops, Tolerances{}), Error);
}

TEST(AdaptiveStep, OuterIterationCapRaisesConvergenceError) {
  std::mt19937_64 rng(44);
  const auto s = random_setup(rng, 40, 40, 0.05);
  const auto F0 = random_lowrank(40, 40, 2, rng);
  auto tols = tight();
  tols.eps_kappa = 0.5;
  tols.max_iter = 1;
  EXPECT_THROW(backward_euler_step(F0, s.ops, tols), ConvergenceError);
}

TEST(AdaptiveStep, InternalsReproduceTheAcceptedSolution) {
  std::mt19937_64 rng(45);
  const auto s = random_setup(rng, 20, 20, 0.01);
  const auto F0 = random_lowrank(20, 20, 2, rng);
  StepInternals in;
  const auto r = backward_euler_step(F0, s.ops, tight(), nullptr, &in);
  ASSERT_EQ(in.S_stages.size(), 1u);
  const LowRankMatrix full{in.U1, in.S_stages[0], in.V1};
  EXPECT_LT(relative_error(densify(r.F), densify(full)), 1e-12);
  EXPECT_EQ(in.U1.cols(), r.report.basis_size_x);
}

TEST(MassRescale, HitsTargetMass) {
  std::mt19937_64 rng(46);
  const auto F = random_lowrank(10, 8, 2, rng);
  LowRankMatrix G = F;
  G.S += DenseMatrix::identity(2);
  const auto out = mass_rescale(G, 3.5, 0.1, 0.2);
  const DenseMatrix d = densify(out);
  double sum = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) sum += d.data()[k];
  EXPECT_NEAR(0.1 * 0.2 * sum, 3.5, 1e-12);
  EXPECT_THROW(mass_rescale(LowRankMatrix::zero(4, 4), 1.0, 0.1, 0.1), Error);
}

TEST(Integrate, ZeroFinalTimeReturnsInitialData) {
  const auto p = make_problem("ex41", 20);
  const auto r = integrate(p, ButcherTableau::backward_euler(), 0.0, 0.01, Tolerances{});
  EXPECT_TRUE(r.reports.empty());
  EXPECT_EQ(frob_diff(densify(r.F), densify(p.initial)), 0.0);
}

TEST(Integrate, LastStepLandsOnFinalTime) {
  const auto p = make_problem("ex41", 16);
  std::size_t observed = 0;
  const auto r = integrate(p, ButcherTableau::backward_euler(), 0.025, 0.01, Tolerances{},
                           [&observed](const StepReport&, const LowRankMatrix&) { ++observed; });
  ASSERT_EQ(r.reports.size(), 3u);
  EXPECT_EQ(observed, 3u);
  EXPECT_DOUBLE_EQ(r.t, 0.025);
  EXPECT_NEAR(r.reports.back().dt, 0.005, 1e-15);
  EXPECT_NEAR(r.reports[0].t, 0.01, 1e-15);
}

TEST(Integrate, SourceDrivenProblemMatchesKroneckerReference) {
  const std::size_t n = 20;
  const auto p = make_problem("ex42", n);
  const double dt = 0.05;
  const auto tab = ButcherTableau::dirk2();
  const auto r = integrate(p, tab, 0.2, dt, tight());
  const auto ops = assemble_operator_set(p.gx, p.gy, p.coeffs, tab.diagonal() * dt);
  const DenseMatrix K = reference_kronecker(ops);
  DenseMatrix F = densify(p.initial);
  for (int step = 0; step < 4; ++step) {
    std::vector<DenseMatrix> src;
    for (double c : tab.c) src.push_back(densify(p.source_at(step * dt + c * dt)));
    F = reference_dirk_step(K, tab, dt, F, src);
  }
  EXPECT_LT(relative_error(densify(r.F), F), 1e-8);
}

TEST(Integrate, StepFailureCarriesPartialReports) {
  const auto p = make_problem("ex41", 24);
  auto tols = tight();
  tols.max_iter = 1;
  tols.eps_kappa = 0.9;
  try {
    integrate(p, ButcherTableau::backward_euler(), 1.0, 0.01, tols);
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos);
    EXPECT_TRUE(e.reports.empty());
  }
}

TEST(StepSize, LambdaDefinitions) {
  const auto p = make_problem("ex43", 64);
  const auto m = coefficient_maxima(p.coeffs, p.gx, p.gy);
  const double dx = p.gx.dx;
  EXPECT_DOUBLE_EQ(step_size(p, StepSpec::dt, 0.3), 0.3);
  EXPECT_NEAR(step_size(p, StepSpec::lambda_a, 7.0), 7.0 * dx / m.sigma_max, 1e-15);
  EXPECT_NEAR(step_size(p, StepSpec::lambda_d, 2.0), 2.0 * dx * dx / m.phi_max, 1e-15);
  EXPECT_THROW(step_size(p, StepSpec::dt, -1.0), ConfigError);
}
