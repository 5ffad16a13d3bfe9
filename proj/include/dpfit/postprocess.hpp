#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dpfit/core.hpp"
#include "dpfit/mechanisms.hpp"
#include "dpfit/solvers/settings.hpp"

namespace dpfit {

struct FitResult {
  Vector weights;
  Shape shape;
  bool converged = true;
  // False only for OLS output, which may carry negative weights.
  bool microdata = true;
  bool rank_deficient = false;
  // Weighted SSE after each stage.
  std::vector<double> stage_objectives;

  Histogram histogram() const { return Histogram(weights, shape); }
};

struct GroupPlan {
  std::string group;
  double cutoff = 0.0;           // +inf when no answer stands out from noise
  int j_star = 0;                // 1-based sorted position of the cutoff, 0 if none
  int j_low = 0;
  double downweight = 1.0;
  std::vector<bool> low;         // per query, in group order
  std::vector<std::string> low_ids;
  Vector aggregate_indicator;    // sum of the low queries
  double aggregate_target = 0.0; // sum of their noisy answers
};

struct ReweightPlan {
  std::vector<GroupPlan> groups;
};

FitResult fit_ols(const MeasurementSet& m);
FitResult fit_nnls(const MeasurementSet& m, const SolverSettings& s = {});
FitResult fit_max(const MeasurementSet& m, const SolverSettings& s = {});
// Priority lists every group name exactly once; empty means workload order.
FitResult fit_sequential(const MeasurementSet& m,
                         const std::vector<std::string>& priority = {},
                         const SolverSettings& s = {});
ReweightPlan plan_reweight(const MeasurementSet& m, double gamma);
FitResult fit_reweighted(const MeasurementSet& m, double gamma,
                         const SolverSettings& s = {});
// Water-filling of the identity answers onto max{0, a_sum}.
FitResult fit_simplex(const MeasurementSet& m);

enum class Algorithm { kOls, kNnls, kMax, kSeq, kWeight, kSimplex, kClamp };

const std::vector<Algorithm>& all_algorithms();
std::string algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(const std::string& name);

struct FitOptions {
  SolverSettings solver;
  double gamma = 0.99;
  std::vector<std::string> priority;
};

// Dispatch for every postprocessing algorithm (not kClamp, which draws its
// own noise).
FitResult run_fitter(Algorithm a, const MeasurementSet& m, const FitOptions& opts);

}  // namespace dpfit
