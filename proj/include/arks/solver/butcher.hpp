#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "arks/errors.hpp"

namespace arks {

// Diagonally implicit Runge-Kutta tableau, stiffly accurate with constant diagonal.
struct ButcherTableau {
  std::string name;
  std::vector<std::vector<double>> a;  // s×s, lower triangular
  std::vector<double> b;
  std::vector<double> c;

  std::size_t stages() const { return b.size(); }
  double diagonal() const { return a.at(0).at(0); }

  static ButcherTableau backward_euler() { return {"be", {{1.0}}, {1.0}, {1.0}}; }

  static ButcherTableau dirk2() {
    const double g = 1.0 - std::sqrt(2.0) / 2.0;
    return {"dirk2", {{g, 0.0}, {1.0 - g, g}}, {1.0 - g, g}, {g, 1.0}};
  }

  static ButcherTableau dirk3() {
    const double x = 0.4358665215;
    const double a31 = -1.5 * x * x + 4.0 * x - 0.25;
    const double a32 = 1.5 * x * x - 5.0 * x + 1.25;
    return {"dirk3",
            {{x, 0.0, 0.0}, {(1.0 - x) / 2.0, x, 0.0}, {a31, a32, x}},
            {a31, a32, x},
            {x, (1.0 + x) / 2.0, 1.0}};
  }

  static ButcherTableau by_name(const std::string& id) {
    if (id == "be") return backward_euler();
    if (id == "dirk2") return dirk2();
    if (id == "dirk3") return dirk3();
    throw ConfigError("unknown integrator '" + id + "' (expected be, dirk2 or dirk3)");
  }

  void validate() const {
    const std::size_t s = b.size();
    if (s == 0 || a.size() != s || c.size() != s) throw ConfigError("ButcherTableau: inconsistent sizes");
    const double d = a[0][0];
    if (!(d > 0.0)) throw ConfigError("ButcherTableau: diagonal must be positive");
    for (std::size_t k = 0; k < s; ++k) {
      if (a[k].size() != s) throw ConfigError("ButcherTableau: a must be square");
      double sum = 0.0;
      for (std::size_t l = 0; l < s; ++l) {
        if (l > k && a[k][l] != 0.0) throw ConfigError("ButcherTableau: a must be lower triangular");
        sum += a[k][l];
      }
      if (std::abs(a[k][k] - d) > 1e-14) throw ConfigError("ButcherTableau: diagonal entries must be constant");
      if (std::abs(sum - c[k]) > 1e-12) throw ConfigError("ButcherTableau: c_k must equal the row sum of a");
    }
    for (std::size_t l = 0; l < s; ++l)
      if (std::abs(b[l] - a[s - 1][l]) > 1e-14) throw ConfigError("ButcherTableau: not stiffly accurate");
  }
};

}  // namespace arks
