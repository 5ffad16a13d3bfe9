#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpfit/benchdata.hpp"
#include "dpfit/core.hpp"
#include "dpfit/mechanisms.hpp"
#include "dpfit/postprocess.hpp"
#include "dpfit/report.hpp"
#include "dpfit/solvers/settings.hpp"

namespace dpfit {

enum class WorkloadKind { k1d, k2d };

struct ExperimentConfig {
  DatasetSpec dataset;
  WorkloadKind workload = WorkloadKind::k1d;
  PrivacyBudget budget = PrivacyBudget::pure(1.0);
  std::vector<Algorithm> algorithms;
  int trials = 1000;
  std::uint64_t seed = 0;
  double gamma = 0.99;
  SolverSettings solver;
  // Replaces the calibrated noise on every group (and the clamp noise).
  // Not reachable from config files.
  std::optional<NoiseSpec> noise_override;

  void validate() const;
};

// Flat "key = value" text; '#' starts a comment. Keys:
//   dataset            Level00-1d style name, or a family: level, stair,
//                      step, splitstairs, difficult, file
//   dataset.k, dataset.dims, dataset.eps, dataset.d, dataset.path,
//   dataset.shape      (e.g. "9x24")
//   workload           1d | 2d (defaults to the dataset's dimensionality)
//   budget             pure | zcdp | approx
//   budget.eps, budget.rho, budget.delta
//   algorithms         comma-separated registry names
//   trials, seed, gamma
//   solver.abs_tol, solver.rel_tol, solver.max_iters, solver.eq_slack,
//   solver.linf_slack
// Throws ConfigError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

Workload make_workload(WorkloadKind kind, const Shape& shape);

struct StderrSummary {
  Vector per_query;  // mean squared error per query
  double total = 0.0;
  double max = 0.0;
  Index argmax = 0;
  double total_stderr = 0.0;
  double max_stderr = 0.0;
};

// Rows of `sq_errors` are trials, columns queries. Needs at least 2 trials.
StderrSummary summarize_stderr(const Matrix& sq_errors);

struct GroupError {
  std::string algorithm;
  std::string group;
  std::vector<std::string> query_ids;
  StderrSummary summary;  // stderrs are NaN when fewer than 2 trials remain
  int trials_used = 0;
};

struct ErrorReport {
  std::string dataset;
  std::string mechanism;
  std::string budget;
  int trials = 0;
  std::vector<GroupError> groups;  // algorithm-major, workload group order
  std::vector<std::uint64_t> measurement_fingerprints;  // one per trial

  const GroupError& find(const std::string& algorithm, const std::string& group) const;
  // True when some algorithm kept no trials.
  bool any_all_unconverged() const;
  // Two rows (Total, Max) per group entry.
  std::vector<ReportRow> rows() const;
};

// Monte-Carlo estimate of per-query squared error. Every algorithm of a trial
// sees the same measurements. Output does not depend on `threads`.
ErrorReport run(const ExperimentConfig& config, int threads = 1);

struct DemoRow {
  std::string variant;  // simplex, clamp, nnls, nnls-nosum
  double c2 = 0.0;      // max per-query MSE over the point queries
  double c2_stderr = 0.0;
  double d2 = 0.0;      // MSE of the sum
  double d2_stderr = 0.0;
  int trials_used = 0;
};

struct DemoSummary {
  Index d = 0;
  double eps = 0.0;
  int trials = 0;
  double baseline = 0.0;  // 8/eps^2
  std::vector<DemoRow> rows;

  const DemoRow& find(const std::string& variant) const;
};

// Point-vs-sum error tradeoff on the difficult dataset.
DemoSummary uncertainty_demo(Index d, double eps, int trials, std::uint64_t seed = 0,
                             int threads = 1);
std::string format_demo(const DemoSummary& s);

}  // namespace dpfit
