#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "arks/bench/config.hpp"
#include "arks/bench/csv.hpp"
#include "arks/bench/experiments.hpp"

namespace arks::bench {

inline std::string prepare_output(const RunConfig& c, const CsvSchema& schema) {
  std::filesystem::create_directories(c.out_dir);
  return (std::filesystem::path(c.out_dir) / schema.file).string();
}

inline std::optional<double> timing(const RunConfig& c, double seconds) {
  if (c.no_timing) return std::nullopt;
  return seconds;
}

inline const char* step_kind_name(StepSpec k) {
  switch (k) {
    case StepSpec::dt: return "dt";
    case StepSpec::lambda_d: return "lambda_d";
    case StepSpec::lambda_a: return "lambda_a";
  }
  return "dt";
}

inline nlohmann::json config_json(const RunConfig& c) {
  return {{"example", c.example},
          {"integrator", c.integrator},
          {"n", c.n},
          {step_kind_name(c.step_kind), c.step_value},
          {"t_final", c.t_final},
          {"tolerances",
           {{"eps_tol", c.tolerances.eps_tol},
            {"eps_kappa", c.tolerances.eps_kappa},
            {"eps", c.tolerances.eps},
            {"eps_gmres", c.tolerances.eps_gmres}}},
          {"seed", c.seed},
          {"paper_scale", c.paper_scale}};
}

inline CsvRow rank_history_row(const StepReport& r) {
  return {format_real(r.t),
          std::to_string(r.rank_before_trunc),
          std::to_string(r.rank_after_trunc),
          std::to_string(r.basis_size_x),
          std::to_string(r.basis_size_y),
          std::to_string(r.krylov_iters),
          std::to_string(r.total_gmres_iters()),
          format_real(r.residual)};
}

// Writes rank_history.csv and summary.json. Rows of completed steps are kept
// when the solver fails part way.
inline RunOutcome run_command(const RunConfig& c) {
  const std::string csv_path = prepare_output(c, rank_history_schema());
  std::vector<CsvRow> rows;
  RunOutcome out;
  try {
    out = run_experiment(c, [&rows](const StepReport& r, const LowRankMatrix&) { rows.push_back(rank_history_row(r)); });
  } catch (...) {
    write_csv(csv_path, rank_history_schema(), rows);
    throw;
  }
  write_csv(csv_path, rank_history_schema(), rows);

  nlohmann::json s;
  s["config"] = config_json(c);
  s["dt"] = out.dt;
  s["steps"] = out.result.reports.size();
  s["final_time"] = out.result.t;
  s["final_residual"] = out.result.reports.empty() ? 0.0 : out.result.reports.back().residual;
  s["final_rank"] = out.result.F.rank();
  s["max_rank"] = out.max_rank;
  s["wall_time_s"] = c.no_timing ? nlohmann::json(nullptr) : nlohmann::json(out.wall_time);
  s["l1_error"] = out.l1_error ? nlohmann::json(*out.l1_error) : nlohmann::json(nullptr);
  std::ofstream f((std::filesystem::path(c.out_dir) / "summary.json").string());
  if (!f) throw Error("cannot write summary.json in " + c.out_dir);
  f << s.dump(2) << '\n';
  return out;
}

inline std::vector<ConvergencePoint> converge_command(const RunConfig& c, const std::vector<double>& dts) {
  const auto pts = convergence_study(c, dts);
  std::vector<CsvRow> rows;
  for (const auto& p : pts)
    rows.push_back({c.integrator, std::to_string(c.n), format_real(p.dt), format_real(p.lambda_d),
                    format_real(p.l1_error), format_optional(p.observed_order)});
  write_csv(prepare_output(c, convergence_schema()), convergence_schema(), rows);
  return pts;
}

inline std::vector<ComplexityPoint> complexity_command(const RunConfig& c, const std::vector<std::size_t>& ns,
                                                       std::size_t reps, std::size_t steps) {
  const auto pts = complexity_study(c, ns, reps, steps);
  std::vector<CsvRow> rows;
  for (const auto& p : pts)
    rows.push_back({std::to_string(p.n), format_real(p.dt), format_optional(timing(c, p.wall_time)),
                    std::to_string(p.max_rank)});
  write_csv(prepare_output(c, complexity_schema()), complexity_schema(), rows);
  return pts;
}

inline std::vector<RankScanPoint> rank_scan_command(const RunConfig& c, std::size_t augmentations, std::size_t reps) {
  const auto pts = rank_scan(c, augmentations, reps);
  std::vector<CsvRow> rows;
  for (const auto& p : pts) rows.push_back({std::to_string(p.rank), format_optional(timing(c, p.solve_time))});
  write_csv(prepare_output(c, gmres_scaling_schema()), gmres_scaling_schema(), rows);
  return pts;
}

inline std::vector<GmresHistory> gmres_study_command(const RunConfig& c, const std::vector<std::size_t>& ns,
                                                     std::size_t max_iter) {
  const auto hs = gmres_study(c, ns, max_iter);
  std::vector<CsvRow> rows;
  for (const auto& h : hs)
    for (std::size_t i = 0; i < h.residuals.size(); ++i)
      rows.push_back({std::to_string(h.n), h.preconditioned ? "1" : "0", std::to_string(i), format_real(h.residuals[i])});
  write_csv(prepare_output(c, gmres_schema()), gmres_schema(), rows);
  return hs;
}

}  // namespace arks::bench
