#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>

#include <json.hpp>

#include "arks/errors.hpp"
#include "arks/problems.hpp"
#include "arks/solver/butcher.hpp"
#include "arks/solver/tolerances.hpp"

namespace arks::bench {

struct RunConfig {
  std::string example = "ex41";
  std::string integrator = "dirk2";
  std::size_t n = 128;
  StepSpec step_kind = StepSpec::dt;
  double step_value = 1e-2;
  double t_final = 1.0;
  Tolerances tolerances;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool no_timing = false;
  bool paper_scale = false;

  void validate() const {
    make_problem(example, 2);
    ButcherTableau::by_name(integrator);
    tolerances.validate();
    if (n < 2) throw ConfigError("n must be at least 2");
    if (!(step_value > 0.0)) throw ConfigError("time step specifier must be positive");
    if (!(t_final >= 0.0)) throw ConfigError("t_final must be non-negative");
  }
};

struct StepSetting {
  StepSpec kind;
  double value;
};

// Partially specified configuration from one source (file or command line).
struct RunSettings {
  std::optional<std::string> example, integrator, out_dir;
  std::optional<std::size_t> n;
  std::optional<StepSetting> step;
  std::optional<double> t_final, eps_tol, eps_kappa, eps, eps_gmres;
  std::optional<std::uint64_t> seed;
  std::optional<bool> no_timing, paper_scale;
};

// Fields set in `over` replace those in `base`.
inline RunSettings merge(const RunSettings& base, const RunSettings& over) {
  RunSettings m = base;
  auto take = [](auto& dst, const auto& src) {
    if (src) dst = src;
  };
  take(m.example, over.example);
  take(m.integrator, over.integrator);
  take(m.out_dir, over.out_dir);
  take(m.n, over.n);
  take(m.step, over.step);
  take(m.t_final, over.t_final);
  take(m.eps_tol, over.eps_tol);
  take(m.eps_kappa, over.eps_kappa);
  take(m.eps, over.eps);
  take(m.eps_gmres, over.eps_gmres);
  take(m.seed, over.seed);
  take(m.no_timing, over.no_timing);
  take(m.paper_scale, over.paper_scale);
  return m;
}

// Problem defaults first, then the settings. Mesh size follows --paper-scale
// unless n is given explicitly.
inline RunConfig resolve(const RunSettings& s) {
  RunConfig c;
  c.example = s.example.value_or("ex41");
  const Problem p = make_problem(c.example, 2);
  const ProblemDefaults& d = p.defaults;
  c.paper_scale = s.paper_scale.value_or(false);
  c.integrator = s.integrator.value_or(d.integrator);
  c.n = s.n.value_or(c.paper_scale ? d.paper_n : d.n);
  c.step_kind = s.step ? s.step->kind : d.step_kind;
  c.step_value = s.step ? s.step->value : d.step_value;
  c.t_final = s.t_final.value_or(d.t_final);
  c.tolerances = d.tolerances;
  if (s.eps_tol) c.tolerances.eps_tol = *s.eps_tol;
  if (s.eps_kappa) c.tolerances.eps_kappa = *s.eps_kappa;
  if (s.eps) c.tolerances.eps = *s.eps;
  if (s.eps_gmres) c.tolerances.eps_gmres = *s.eps_gmres;
  c.out_dir = s.out_dir.value_or(".");
  c.seed = s.seed.value_or(0);
  c.no_timing = s.no_timing.value_or(false);
  c.validate();
  return c;
}

inline RunSettings settings_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  RunSettings s;
  int step_count = 0;
  auto number = [](const nlohmann::json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError("config: '" + key + "' must be a number");
    return v.get<double>();
  };
  auto apply_tolerances = [&](const nlohmann::json& t) {
    if (!t.is_object()) throw ConfigError("config: 'tolerances' must be an object");
    for (const auto& [key, v] : t.items()) {
      if (key == "eps_tol") s.eps_tol = number(v, key);
      else if (key == "eps_kappa") s.eps_kappa = number(v, key);
      else if (key == "eps") s.eps = number(v, key);
      else if (key == "eps_gmres") s.eps_gmres = number(v, key);
      else throw ConfigError("config: unknown tolerance '" + key + "'");
    }
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "example" || key == "integrator" || key == "out") {
      if (!v.is_string()) throw ConfigError("config: '" + key + "' must be a string");
      (key == "example" ? s.example : key == "integrator" ? s.integrator : s.out_dir) = v.get<std::string>();
    } else if (key == "n") {
      if (!v.is_number_unsigned()) throw ConfigError("config: 'n' must be a positive integer");
      s.n = v.get<std::size_t>();
    } else if (key == "seed") {
      if (!v.is_number_unsigned()) throw ConfigError("config: 'seed' must be a non-negative integer");
      s.seed = v.get<std::uint64_t>();
    } else if (key == "dt" || key == "lambda_d" || key == "lambda_a") {
      ++step_count;
      const StepSpec kind = key == "dt" ? StepSpec::dt : key == "lambda_d" ? StepSpec::lambda_d : StepSpec::lambda_a;
      s.step = StepSetting{kind, number(v, key)};
    } else if (key == "t_final") {
      s.t_final = number(v, key);
    } else if (key == "tolerances") {
      apply_tolerances(v);
    } else if (key == "eps_tol" || key == "eps_kappa" || key == "eps" || key == "eps_gmres") {
      apply_tolerances(nlohmann::json{{key, v}});
    } else if (key == "no_timing" || key == "paper_scale") {
      if (!v.is_boolean()) throw ConfigError("config: '" + key + "' must be a boolean");
      (key == "no_timing" ? s.no_timing : s.paper_scale) = v.get<bool>();
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  if (step_count > 1) throw ConfigError("config: give exactly one of dt, lambda_d, lambda_a");
  return s;
}

inline RunSettings settings_from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  try {
    return settings_from_json(nlohmann::json::parse(f));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
}

}  // namespace arks::bench
