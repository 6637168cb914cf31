#include <cstddef>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arks/bench/commands.hpp"
#include "arks/bench/config.hpp"

namespace {

using arks::bench::RunSettings;
using arks::bench::StepSetting;

constexpr int kUsageError = 2;
constexpr int kSolverError = 1;

struct CommonFlags {
  std::string config_file;
  std::string example, integrator, out;
  std::size_t n = 0;
  double dt = 0, lambda_d = 0, lambda_a = 0, t_final = 0;
  double eps_tol = 0, eps_kappa = 0, eps = 0, eps_gmres = 0;
  std::uint64_t seed = 0;
  bool no_timing = false, paper_scale = false;
  std::vector<CLI::Option*> step_opts;
  CLI::App* app = nullptr;

  void attach(CLI::App* sub, bool with_step) {
    app = sub;
    sub->add_option("--config", config_file, "JSON file with run settings")->check(CLI::ExistingFile);
    sub->add_option("--example", example, "ex41 | ex42 | ex43 | ex44");
    sub->add_option("--integrator", integrator, "be | dirk2 | dirk3");
    sub->add_option("--n", n, "interior points per dimension")->check(CLI::PositiveNumber);
    if (with_step) {
      auto* a = sub->add_option("--dt", dt, "time step");
      auto* b = sub->add_option("--lambda-d", lambda_d, "diffusive step number dt*phi_max/dx^2");
      auto* c = sub->add_option("--lambda-a", lambda_a, "advective step number dt*sigma_max/dx");
      a->excludes(b)->excludes(c);
      b->excludes(c);
      step_opts = {a, b, c};
    }
    sub->add_option("--t-final", t_final, "final time");
    sub->add_option("--eps-tol", eps_tol, "accepted relative residual");
    sub->add_option("--eps-kappa", eps_kappa, "basis truncation threshold");
    sub->add_option("--eps", eps, "singular value truncation threshold");
    sub->add_option("--eps-gmres", eps_gmres, "inner solve tolerance");
    sub->add_option("--seed", seed, "recorded in the output");
    sub->add_option("--out", out, "output directory");
    sub->add_flag("--no-timing", no_timing, "leave timing cells empty");
    sub->add_flag("--paper-scale", paper_scale, "use the published grid sizes");
  }

  bool given(const std::string& name) const {
    const auto* opt = app->get_option_no_throw(name);
    return opt && opt->count() > 0;
  }

  RunSettings cli_settings() const {
    RunSettings s;
    if (given("--example")) s.example = example;
    if (given("--integrator")) s.integrator = integrator;
    if (given("--out")) s.out_dir = out;
    if (given("--n")) s.n = n;
    if (given("--dt")) s.step = StepSetting{arks::StepSpec::dt, dt};
    if (given("--lambda-d")) s.step = StepSetting{arks::StepSpec::lambda_d, lambda_d};
    if (given("--lambda-a")) s.step = StepSetting{arks::StepSpec::lambda_a, lambda_a};
    if (given("--t-final")) s.t_final = t_final;
    if (given("--eps-tol")) s.eps_tol = eps_tol;
    if (given("--eps-kappa")) s.eps_kappa = eps_kappa;
    if (given("--eps")) s.eps = eps;
    if (given("--eps-gmres")) s.eps_gmres = eps_gmres;
    if (given("--seed")) s.seed = seed;
    if (no_timing) s.no_timing = true;
    if (paper_scale) s.paper_scale = true;
    return s;
  }

  arks::bench::RunConfig resolve(const RunSettings& command_defaults = {}) const {
    RunSettings s = command_defaults;
    if (!config_file.empty()) s = arks::bench::merge(s, arks::bench::settings_from_file(config_file));
    return arks::bench::resolve(arks::bench::merge(s, cli_settings()));
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive low-rank implicit time integration benchmarks"};
  app.require_subcommand(1);

  CommonFlags run_flags, conv_flags, cx_flags, gm_flags;
  auto* run = app.add_subcommand("run", "integrate one example and record the rank history");
  run_flags.attach(run, true);

  auto* converge = app.add_subcommand("converge", "temporal convergence against a refined run");
  conv_flags.attach(converge, false);
  std::vector<double> dts, lambda_ds;
  auto* dts_opt = converge->add_option("--dts", dts, "time steps (at least 3)");
  auto* lds_opt = converge->add_option("--lambda-ds", lambda_ds, "diffusive step numbers (at least 3)");
  dts_opt->excludes(lds_opt);

  auto* complexity = app.add_subcommand("complexity", "wall time against grid size");
  cx_flags.attach(complexity, true);
  std::vector<std::size_t> cx_ns;
  std::size_t reps = 3, steps = 5, augmentations = 8;
  bool rank_scan = false;
  complexity->add_option("--ns", cx_ns, "grid sizes (at least 4)");
  complexity->add_option("--reps", reps, "repetitions per point, median reported")->check(CLI::PositiveNumber);
  complexity->add_option("--steps", steps, "time steps per run")->check(CLI::PositiveNumber);
  complexity->add_flag("--rank-scan", rank_scan, "time the reduced solve against untruncated basis rank");
  complexity->add_option("--augmentations", augmentations, "basis augmentations in the rank scan")
      ->check(CLI::PositiveNumber);

  auto* gmres = app.add_subcommand("gmres-study", "inner solver histories with and without preconditioning");
  gm_flags.attach(gmres, true);
  std::vector<std::size_t> gm_ns;
  std::size_t max_iter = 500;
  gmres->add_option("--ns", gm_ns, "grid sizes")->required()->expected(0, -1);
  gmres->add_option("--max-iter", max_iter, "iteration cap")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (run->parsed()) {
      const auto c = run_flags.resolve();
      const auto out = arks::bench::run_command(c);
      std::cout << "run: " << c.example << " n=" << c.n << " steps=" << out.result.reports.size()
                << " max_rank=" << out.max_rank << " -> " << c.out_dir << '\n';
    } else if (converge->parsed()) {
      auto c = conv_flags.resolve();
      std::vector<double> steps_dt = dts;
      if (!lambda_ds.empty()) {
        const auto p = arks::make_problem(c.example, c.n);
        steps_dt.clear();
        for (double l : lambda_ds) steps_dt.push_back(arks::step_size(p, arks::StepSpec::lambda_d, l));
      }
      const auto pts = arks::bench::converge_command(c, steps_dt);
      for (const auto& p : pts)
        std::cout << "dt=" << p.dt << " l1_error=" << p.l1_error
                  << (p.observed_order ? " order=" + std::to_string(*p.observed_order) : std::string()) << '\n';
    } else if (complexity->parsed()) {
      const auto c = cx_flags.resolve();
      if (rank_scan) {
        for (const auto& p : arks::bench::rank_scan_command(c, augmentations, reps))
          std::cout << "rank=" << p.rank << " iterations=" << p.iterations << '\n';
      } else {
        for (const auto& p : arks::bench::complexity_command(c, cx_ns, reps, steps))
          std::cout << "n=" << p.n << " max_rank=" << p.max_rank << '\n';
      }
    } else if (gmres->parsed()) {
      const auto& ns_given = gmres->get_option("--ns")->results();
      if (ns_given.empty() || (ns_given.size() == 1 && ns_given.front().empty())) {
        std::cerr << "error: gmres-study: --ns needs at least one grid size\n";
        return kUsageError;
      }
      RunSettings defaults;
      defaults.step = StepSetting{arks::StepSpec::dt, 0.01};
      const auto c = gm_flags.resolve(defaults);
      for (const auto& h : arks::bench::gmres_study_command(c, gm_ns, max_iter))
        std::cout << "n=" << h.n << (h.preconditioned ? " preconditioned" : " plain") << " iterations=" << h.iterations()
                  << (h.converged ? "" : " (not converged)") << '\n';
    }
  } catch (const arks::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverError;
  }
  return 0;
}
