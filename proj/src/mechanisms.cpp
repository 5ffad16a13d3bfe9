#include "dpfit/mechanisms.hpp"

#include <bit>
#include <cmath>
#include <utility>

#include "dpfit/error.hpp"
#include "dpfit/format.hpp"

namespace dpfit {

PrivacyBudget PrivacyBudget::pure(double epsilon) {
  if (!(epsilon > 0) || !std::isfinite(epsilon))
    throw InvalidArgument("epsilon must be positive");
  return PrivacyBudget(BudgetKind::kPure, epsilon, 0.0, 0.0);
}

PrivacyBudget PrivacyBudget::zcdp(double rho) {
  if (!(rho > 0) || !std::isfinite(rho))
    throw InvalidArgument("rho must be positive");
  return PrivacyBudget(BudgetKind::kZcdp, 0.0, rho, 0.0);
}

PrivacyBudget PrivacyBudget::approx(double epsilon, double delta) {
  if (!(epsilon > 0) || !std::isfinite(epsilon))
    throw InvalidArgument("epsilon must be positive");
  if (!(delta > 0 && delta < 1)) throw InvalidArgument("delta must be in (0, 1)");
  return PrivacyBudget(BudgetKind::kApprox, epsilon, 0.0, delta);
}

std::string PrivacyBudget::describe() const {
  switch (kind_) {
    case BudgetKind::kPure:
      return "eps=" + format_double(epsilon_);
    case BudgetKind::kZcdp:
      return "rho=" + format_double(rho_);
    case BudgetKind::kApprox:
      return "eps=" + format_double(epsilon_) + ";delta=" + format_double(delta_);
  }
  return "";
}

std::string PrivacyBudget::mechanism_name() const {
  switch (kind_) {
    case BudgetKind::kPure:
      return "laplace";
    case BudgetKind::kZcdp:
      return "gauss";
    case BudgetKind::kApprox:
      return "tdgeo";
  }
  return "";
}

std::int64_t truncation_bound(double epsilon, double delta, double parts) {
  const double b = (parts / epsilon) * std::log(2.0 * parts / delta) + 1.0;
  return static_cast<std::int64_t>(std::ceil(b));
}

std::vector<NoiseSpec> calibrate(const PrivacyBudget& budget, const Workload& w) {
  if (w.group_count() == 0) throw InvalidArgument("cannot calibrate an empty workload");
  NoiseSpec spec = NoiseSpec::zero();
  switch (budget.kind()) {
    case BudgetKind::kPure:
      spec = NoiseSpec::laplace(l1_sensitivity(w) / budget.epsilon());
      break;
    case BudgetKind::kZcdp: {
      const double d2 = l2_sensitivity(w);
      spec = NoiseSpec::gaussian(d2 * d2 / (2.0 * budget.rho()));
      break;
    }
    case BudgetKind::kApprox: {
      const double d1 = l1_sensitivity(w);
      spec = NoiseSpec::truncated_double_geometric(
          budget.epsilon() / d1, truncation_bound(budget.epsilon(), budget.delta(), d1));
      break;
    }
  }
  return std::vector<NoiseSpec>(w.group_count(), spec);
}

MeasurementSet::MeasurementSet(std::shared_ptr<const Workload> workload,
                               std::vector<double> answers)
    : workload_(std::move(workload)) {
  if (!workload_) throw InvalidArgument("measurement set needs a workload");
  if (answers.size() != workload_->query_count())
    throw DimensionError("need one answer per workload query");
  entries_.reserve(answers.size());
  std::size_t k = 0;
  const auto& groups = workload_->groups();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (!groups[g].noise)
      throw InvalidArgument("query group " + groups[g].name + " is not calibrated");
    for (std::size_t q = 0; q < groups[g].queries.size(); ++q) {
      entries_.push_back(
          {groups[g].queries[q].id(), g, q, answers[k++], *groups[g].noise});
    }
  }
}

std::vector<const Measurement*> MeasurementSet::group_entries(std::size_t group) const {
  std::vector<const Measurement*> out;
  for (const auto& e : entries_)
    if (e.group == group) out.push_back(&e);
  return out;
}

const CountingQuery& MeasurementSet::query_of(const Measurement& m) const {
  return workload_->groups()[m.group].queries[m.query];
}

std::uint64_t MeasurementSet::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xff;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& e : entries_) {
    for (char c : e.query_id) feed(static_cast<unsigned char>(c));
    feed(std::bit_cast<std::uint64_t>(e.answer));
  }
  return h;
}

MeasurementSet measure(const Histogram& h, std::shared_ptr<const Workload> workload,
                       Rng& rng) {
  if (!workload) throw InvalidArgument("measure needs a workload");
  if (workload->cells() != h.size())
    throw DimensionError("histogram does not match workload shape");
  std::vector<double> answers;
  answers.reserve(workload->query_count());
  for (const auto& g : workload->groups()) {
    if (!g.noise) throw InvalidArgument("query group " + g.name + " is not calibrated");
    for (const auto& q : g.queries) answers.push_back(evaluate(q, h) + g.noise->sample(rng));
  }
  return MeasurementSet(std::move(workload), std::move(answers));
}

Histogram clamp_mechanism(const Histogram& h, const PrivacyBudget& budget, Rng& rng) {
  NoiseSpec spec = NoiseSpec::zero();
  switch (budget.kind()) {
    case BudgetKind::kPure:
      spec = NoiseSpec::double_geometric(budget.epsilon());
      break;
    case BudgetKind::kZcdp:
      spec = NoiseSpec::discrete_gaussian(1.0 / (2.0 * budget.rho()));
      break;
    case BudgetKind::kApprox:
      throw InvalidArgument("clamp mechanism supports pure DP and zCDP budgets only");
  }
  Vector out(h.size());
  for (Index i = 0; i < h.size(); ++i) out[i] = std::max(0.0, h[i] + spec.sample(rng));
  return Histogram(std::move(out), h.shape());
}

}  // namespace dpfit
