// Integrates the rotating-flow example on a small grid and prints the rank history.

#include <cstdio>

#include "arks/problems.hpp"
#include "arks/solver/integrate.hpp"

int main() {
  const arks::Problem p = arks::make_problem("ex41", 128);
  const double dt = arks::step_size(p, arks::StepSpec::lambda_d, 50.0);
  const auto tab = arks::ButcherTableau::by_name("dirk2");
  const auto res = arks::integrate(p, tab, 0.1, dt, p.defaults.tolerances);
  for (const auto& r : res.reports)
    std::printf("t=%.4f rank=%zu basis=%zux%zu residual=%.2e\n", r.t, r.rank_after_trunc, r.basis_size_x,
                r.basis_size_y, r.residual);
  return 0;
}
