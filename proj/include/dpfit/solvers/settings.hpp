#pragma once

namespace dpfit {

struct SolverSettings {
  double abs_tol = 1e-7;
  double rel_tol = 1e-7;
  int max_iters = 20000;
  // Half-width of the band that replaces each equality constraint.
  double eq_slack = 1e-3;
  // Added to the L∞ distance before the second max-fitting stage.
  double linf_slack = 1e-2;

  void validate() const;
};

}  // namespace dpfit
