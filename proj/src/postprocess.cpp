#include "dpfit/postprocess.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dpfit/error.hpp"
#include "dpfit/solvers/order_stats.hpp"
#include "dpfit/solvers/quadratic_fit.hpp"
#include "dpfit/solvers/water_fill.hpp"

namespace dpfit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

FitTerm term_for(const MeasurementSet& m, const Measurement& e, double weight) {
  return {m.query_of(e).indicator(), e.answer, weight};
}

QuadraticFitProblem full_problem(const MeasurementSet& m) {
  QuadraticFitProblem p;
  p.dim = m.workload().cells();
  for (const auto& e : m.entries()) p.terms.push_back(term_for(m, e, 1.0 / e.noise.fit_variance()));
  return p;
}

FitResult make_result(const MeasurementSet& m, Vector x) {
  FitResult r;
  r.weights = std::move(x);
  r.shape = m.workload().shape();
  return r;
}

}  // namespace

FitResult fit_ols(const MeasurementSet& m) {
  QuadraticFitProblem p = full_problem(m);
  p.nonneg = false;
  auto wls = solve_wls(p);
  FitResult r = make_result(m, std::move(wls.x));
  r.microdata = false;
  r.rank_deficient = wls.rank_deficient;
  r.stage_objectives.push_back(p.objective(r.weights));
  return r;
}

FitResult fit_nnls(const MeasurementSet& m, const SolverSettings& s) {
  const QuadraticFitProblem p = full_problem(m);
  auto res = solve_nnls(p, s);
  FitResult r = make_result(m, std::move(res.x));
  r.converged = res.converged;
  r.stage_objectives.push_back(res.objective);
  return r;
}

FitResult fit_max(const MeasurementSet& m, const SolverSettings& s) {
  QuadraticFitProblem p = full_problem(m);
  const auto mm = solve_minmax(p, s);
  for (const auto& e : m.entries()) {
    p.linf_caps.push_back({m.query_of(e).indicator(), e.answer, mm.dist + s.linf_slack,
                           std::sqrt(e.noise.fit_variance())});
  }
  auto res = solve_nnls(p, s);
  FitResult r = make_result(m, std::move(res.x));
  r.converged = mm.converged && res.converged;
  r.stage_objectives = {mm.dist, res.objective};
  return r;
}

FitResult fit_sequential(const MeasurementSet& m, const std::vector<std::string>& priority,
                         const SolverSettings& s) {
  const Workload& w = m.workload();
  std::vector<std::size_t> order;
  if (priority.empty()) {
    order.resize(w.group_count());
    std::iota(order.begin(), order.end(), std::size_t{0});
  } else {
    if (priority.size() != w.group_count())
      throw InvalidArgument("priority must list every query group exactly once");
    std::vector<bool> seen(w.group_count(), false);
    for (const auto& name : priority) {
      const auto g = w.find_group(name);
      if (!g) throw InvalidArgument("unknown query group in priority: " + name);
      if (seen[*g]) throw InvalidArgument("query group listed twice in priority: " + name);
      seen[*g] = true;
      order.push_back(*g);
    }
  }

  const Index n = w.cells();
  FitResult r = make_result(m, Vector::Zero(n));
  std::vector<const Vector*> fitted;  // indicators of already-fitted queries
  for (std::size_t stage = 0; stage < order.size(); ++stage) {
    QuadraticFitProblem p;
    p.dim = n;
    for (const Measurement* e : m.group_entries(order[stage]))
      p.terms.push_back(term_for(m, *e, 1.0 / e->noise.fit_variance()));

    bool determined = false;
    if (!fitted.empty()) {
      Matrix c(static_cast<Index>(fitted.size()), n);
      for (std::size_t i = 0; i < fitted.size(); ++i)
        c.row(static_cast<Index>(i)) = fitted[i]->transpose();
      determined = Eigen::ColPivHouseholderQR<Matrix>(c).rank() == n;
      if (!determined) {
        for (const Vector* q : fitted) p.equalities.push_back({*q, q->dot(r.weights), s.eq_slack});
      }
    }

    if (!determined) {
      auto res = solve_nnls(p, s);
      r.weights = std::move(res.x);
      r.converged = r.converged && res.converged;
    }
    r.stage_objectives.push_back(p.objective(r.weights));
    for (const Measurement* e : m.group_entries(order[stage])) fitted.push_back(&m.query_of(*e).indicator());
  }
  return r;
}

ReweightPlan plan_reweight(const MeasurementSet& m, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("confidence must be in (0, 1)");
  const Workload& w = m.workload();
  ReweightPlan plan;
  for (std::size_t g = 0; g < w.group_count(); ++g) {
    const auto entries = m.group_entries(g);
    const NoiseSpec& spec = entries.front()->noise;
    for (const Measurement* e : entries)
      if (!(e->noise == spec))
        throw InvalidArgument("query group " + w.groups()[g].name + " mixes noise distributions");

    const std::size_t count = entries.size();
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (entries[a]->answer != entries[b]->answer) return entries[a]->answer < entries[b]->answer;
      return entries[a]->query_id < entries[b]->query_id;
    });

    GroupPlan gp;
    gp.group = w.groups()[g].name;
    gp.cutoff = kInf;
    for (std::size_t j = 1; j <= count; ++j) {
      const double a_j = entries[order[j - 1]]->answer;
      if (max_exceed_prob(spec, static_cast<int>(j), a_j) <= 1.0 - gamma) {
        gp.j_star = static_cast<int>(j);
        gp.cutoff = a_j;
        break;
      }
    }

    gp.low.assign(count, false);
    gp.aggregate_indicator = Vector::Zero(w.cells());
    for (std::size_t q = 0; q < count; ++q) {
      if (entries[q]->answer < gp.cutoff) {
        gp.low[q] = true;
        ++gp.j_low;
        gp.low_ids.push_back(entries[q]->query_id);
        gp.aggregate_indicator += m.query_of(*entries[q]).indicator();
        gp.aggregate_target += entries[q]->answer;
      }
    }
    const double floor = std::max(std::sqrt(spec.fit_variance()), 1.0);
    gp.downweight = std::max(max_order_quantile(spec, std::max(gp.j_low, 1), 0.5), floor);
    plan.groups.push_back(std::move(gp));
  }
  return plan;
}

FitResult fit_reweighted(const MeasurementSet& m, double gamma, const SolverSettings& s) {
  const ReweightPlan plan = plan_reweight(m, gamma);
  QuadraticFitProblem p;
  p.dim = m.workload().cells();
  for (std::size_t g = 0; g < plan.groups.size(); ++g) {
    const GroupPlan& gp = plan.groups[g];
    const auto entries = m.group_entries(g);
    const double var = entries.front()->noise.fit_variance();
    for (std::size_t q = 0; q < entries.size(); ++q) {
      const double weight =
          gp.low[q] ? 1.0 / (2.0 * var * gp.downweight * gp.downweight) : 1.0 / var;
      p.terms.push_back(term_for(m, *entries[q], weight));
    }
    if (gp.j_low > 0) {
      p.terms.push_back({gp.aggregate_indicator, gp.aggregate_target,
                         1.0 / (2.0 * static_cast<double>(gp.j_low) * var)});
    }
  }
  auto res = solve_nnls(p, s);
  FitResult r = make_result(m, std::move(res.x));
  r.converged = res.converged;
  r.stage_objectives.push_back(res.objective);
  return r;
}

FitResult fit_simplex(const MeasurementSet& m) {
  const Workload& w = m.workload();
  const auto sum_g = w.find_group("sum");
  const auto id_g = w.find_group("identity");
  if (!sum_g) throw InvalidArgument("simplex fit needs a sum measurement");
  if (!id_g) throw InvalidArgument("simplex fit needs identity measurements");
  const auto sums = m.group_entries(*sum_g);
  if (sums.size() != 1) throw InvalidArgument("simplex fit needs exactly one sum measurement");

  const Index n = w.cells();
  Vector a = Vector::Constant(n, std::numeric_limits<double>::quiet_NaN());
  for (const Measurement* e : m.group_entries(*id_g)) {
    const Vector& ind = m.query_of(*e).indicator();
    if (ind.sum() != 1.0) throw InvalidArgument("identity queries must each cover one cell");
    Index cell;
    ind.maxCoeff(&cell);
    a[cell] = e->answer;
  }
  if (!a.allFinite()) throw InvalidArgument("identity measurements do not cover every cell");

  FitResult r = make_result(m, simplex_water_fill(a, std::max(0.0, sums.front()->answer)));
  double obj = 0.0;
  for (const auto g : {*sum_g, *id_g})
    for (const Measurement* e : m.group_entries(g)) {
      const double d = e->answer - m.query_of(*e).indicator().dot(r.weights);
      obj += d * d / e->noise.fit_variance();
    }
  r.stage_objectives.push_back(obj);
  return r;
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all = {Algorithm::kOls,    Algorithm::kNnls,
                                             Algorithm::kMax,    Algorithm::kSeq,
                                             Algorithm::kWeight, Algorithm::kSimplex,
                                             Algorithm::kClamp};
  return all;
}

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kOls: return "ols";
    case Algorithm::kNnls: return "nnls";
    case Algorithm::kMax: return "max";
    case Algorithm::kSeq: return "seq";
    case Algorithm::kWeight: return "weight";
    case Algorithm::kSimplex: return "simplex";
    case Algorithm::kClamp: return "clamp";
  }
  return "?";
}

std::optional<Algorithm> parse_algorithm(const std::string& name) {
  for (Algorithm a : all_algorithms())
    if (algorithm_name(a) == name) return a;
  return std::nullopt;
}

FitResult run_fitter(Algorithm a, const MeasurementSet& m, const FitOptions& opts) {
  switch (a) {
    case Algorithm::kOls: return fit_ols(m);
    case Algorithm::kNnls: return fit_nnls(m, opts.solver);
    case Algorithm::kMax: return fit_max(m, opts.solver);
    case Algorithm::kSeq: return fit_sequential(m, opts.priority, opts.solver);
    case Algorithm::kWeight: return fit_reweighted(m, opts.gamma, opts.solver);
    case Algorithm::kSimplex: return fit_simplex(m);
    case Algorithm::kClamp: break;
  }
  throw InvalidArgument("clamp is a mechanism, not a postprocessor");
}

}  // namespace dpfit
