#pragma once

#include <memory>
#include <string>
#include <vector>

#include "dpfit/core.hpp"
#include "dpfit/noise.hpp"
#include "dpfit/rng.hpp"

namespace dpfit {

enum class BudgetKind { kPure, kZcdp, kApprox };

class PrivacyBudget {
 public:
  static PrivacyBudget pure(double epsilon);
  static PrivacyBudget zcdp(double rho);
  static PrivacyBudget approx(double epsilon, double delta);

  BudgetKind kind() const { return kind_; }
  double epsilon() const { return epsilon_; }
  double rho() const { return rho_; }
  double delta() const { return delta_; }

  // "eps=1", "rho=0.5", "eps=1;delta=1e-06"
  std::string describe() const;
  // "laplace", "gauss", "tdgeo": the noise family calibrate() picks.
  std::string mechanism_name() const;

 private:
  PrivacyBudget(BudgetKind kind, double epsilon, double rho, double delta)
      : kind_(kind), epsilon_(epsilon), rho_(rho), delta_(delta) {}

  BudgetKind kind_;
  double epsilon_ = 0.0;
  double rho_ = 0.0;
  double delta_ = 0.0;
};

// One noise spec per group, identical across groups:
//   pure   -> Laplace(Δ1/ε)
//   zCDP   -> Gaussian(Δ2²/(2ρ))
//   approx -> TDGeo(ε/Δ1, ⌈(Δ1/ε)·ln(2Δ1/δ) + 1⌉)
std::vector<NoiseSpec> calibrate(const PrivacyBudget& budget, const Workload& w);

// Smallest truncation bound that makes TDGeo(rate) noise on one of `parts`
// composed releases (ε/parts, δ/parts)-DP.
std::int64_t truncation_bound(double epsilon, double delta, double parts);

struct Measurement {
  std::string query_id;
  std::size_t group;
  std::size_t query;  // position within the group
  double answer;
  NoiseSpec noise;
};

// Noisy answers for every query of a calibrated workload, in workload order.
class MeasurementSet {
 public:
  MeasurementSet(std::shared_ptr<const Workload> workload,
                 std::vector<double> answers);

  const Workload& workload() const { return *workload_; }
  std::shared_ptr<const Workload> workload_ptr() const { return workload_; }
  const std::vector<Measurement>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

  // Entries belonging to one group, in query order.
  std::vector<const Measurement*> group_entries(std::size_t group) const;
  const CountingQuery& query_of(const Measurement& m) const;

  // Order-sensitive FNV-1a hash over ids and answer bit patterns.
  std::uint64_t fingerprint() const;

 private:
  std::shared_ptr<const Workload> workload_;
  std::vector<Measurement> entries_;
};

MeasurementSet measure(const Histogram& h,
                       std::shared_ptr<const Workload> workload, Rng& rng);

// Point-optimized direct mechanism: cells max{0, cell + noise} with
// DGeo(ε) noise (pure) or DGauss(1/(2ρ)) noise (zCDP). No sum is measured.
Histogram clamp_mechanism(const Histogram& h, const PrivacyBudget& budget,
                          Rng& rng);

}  // namespace dpfit
