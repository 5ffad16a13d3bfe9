#pragma once

#include <vector>

#include "dpfit/core.hpp"
#include "dpfit/solvers/settings.hpp"

namespace dpfit {

struct FitTerm {
  Vector indicator;
  double target;
  double weight;  // > 0
};

// |indicator·x − rhs| ≤ slack
struct EqualityConstraint {
  Vector indicator;
  double rhs;
  double slack;
};

// |center − indicator·x| ≤ cap·scale
struct LinfCap {
  Vector indicator;
  double center;
  double cap;
  double scale;
};

// Weighted least squares Σ w·(a − q·x)² over x ∈ R^dim, optionally with
// x ≥ 0, banded equalities, and L∞ caps.
struct QuadraticFitProblem {
  Index dim = 0;
  std::vector<FitTerm> terms;
  bool nonneg = true;
  std::vector<EqualityConstraint> equalities;
  std::vector<LinfCap> linf_caps;

  void validate() const;
  Matrix design() const;   // indicators as rows
  Vector targets() const;
  Vector weights() const;
  double objective(const Vector& x) const;
  // Largest amount by which x violates an equality band or a cap.
  double max_violation(const Vector& x) const;
};

struct WlsResult {
  Vector x;
  Index rank = 0;
  bool rank_deficient = false;
};

struct NnlsResult {
  Vector x;
  bool converged = false;
  int iterations = 0;
  double objective = 0.0;
  double kkt_residual = 0.0;
  double max_violation = 0.0;
};

struct MinmaxResult {
  double dist = 0.0;
  Vector x;
  bool converged = false;
  int steps = 0;
};

// Unconstrained weighted least squares; minimum-norm solution when the
// design is rank deficient.
WlsResult solve_wls(const QuadraticFitProblem& p);

// Weighted least squares with every constraint the problem carries.
// Throws InfeasibleError when the constraint set admits no point.
NnlsResult solve_nnls(const QuadraticFitProblem& p, const SolverSettings& s);

// min over feasible x of max_q |a_q − q·x| / std_q, std_q = 1/√w_q, by
// bisection on the distance with a violation-minimizing feasibility check.
MinmaxResult solve_minmax(const QuadraticFitProblem& p, const SolverSettings& s);

// Max normalized deviation max_q |a_q − q·x|·√w_q.
double max_normalized_deviation(const QuadraticFitProblem& p, const Vector& x);

// KKT residual for the nonnegativity-only problem: max over free coordinates
// of |∇|, and over zero coordinates of max{−∇, 0}.
double nnls_kkt_residual(const QuadraticFitProblem& p, const Vector& x);

}  // namespace dpfit
