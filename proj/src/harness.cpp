#include "dpfit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "dpfit/error.hpp"
#include "dpfit/format.hpp"

namespace dpfit {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs body(i) for i in [0, n) on up to `threads` workers.
template <typename Body>
void parallel_for(int n, int threads, Body body) {
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(n, 1));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

double sample_sd(const Vector& v) {
  const double mean = v.mean();
  return std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
}

Histogram clamp_with(const Histogram& h, const NoiseSpec& spec, Rng& rng) {
  Vector out(h.size());
  for (Index i = 0; i < h.size(); ++i) out[i] = std::max(0.0, h[i] + spec.sample(rng));
  return Histogram(std::move(out), h.shape());
}

StderrSummary summarize_rows(const Matrix& sq) {
  if (sq.rows() >= 2) return summarize_stderr(sq);
  StderrSummary s;
  s.per_query = sq.rows() == 1 ? Vector(sq.row(0).transpose()) : Vector::Constant(sq.cols(), kNaN);
  s.total = s.per_query.sum();
  s.max = sq.rows() == 1 ? s.per_query.maxCoeff(&s.argmax) : kNaN;
  s.total_stderr = kNaN;
  s.max_stderr = kNaN;
  return s;
}

}  // namespace

Workload make_workload(WorkloadKind kind, const Shape& shape) {
  if (kind == WorkloadKind::k1d) {
    if (shape.size() != 1) throw InvalidArgument("1d workload needs a 1-D histogram");
    return make_workload_1d(shape[0]);
  }
  if (shape.size() != 2) throw InvalidArgument("2d workload needs a 2-D histogram");
  return make_workload_2d(shape[0], shape[1]);
}

StderrSummary summarize_stderr(const Matrix& sq_errors) {
  const Index n = sq_errors.rows();
  if (n < 2) throw InvalidArgument("standard errors need at least 2 trials");
  if (sq_errors.cols() == 0) throw InvalidArgument("no queries to summarize");
  const double root_n = std::sqrt(static_cast<double>(n));
  StderrSummary s;
  s.per_query = sq_errors.colwise().mean().transpose();
  s.total = s.per_query.sum();
  s.max = s.per_query.maxCoeff(&s.argmax);
  s.total_stderr = sample_sd(sq_errors.rowwise().sum()) / root_n;
  s.max_stderr = sample_sd(sq_errors.col(s.argmax)) / root_n;
  return s;
}

const GroupError& ErrorReport::find(const std::string& algorithm, const std::string& group) const {
  for (const auto& g : groups)
    if (g.algorithm == algorithm && g.group == group) return g;
  throw InvalidArgument("no report entry for " + algorithm + "/" + group);
}

bool ErrorReport::any_all_unconverged() const {
  return std::any_of(groups.begin(), groups.end(), [](const GroupError& g) { return g.trials_used == 0; });
}

std::vector<ReportRow> ErrorReport::rows() const {
  std::vector<ReportRow> out;
  for (const auto& g : groups) {
    out.push_back({dataset, mechanism, budget, g.algorithm, g.group, "Total", g.summary.total,
                   g.summary.total_stderr, g.trials_used});
    out.push_back({dataset, mechanism, budget, g.algorithm, g.group, "Max", g.summary.max,
                   g.summary.max_stderr, g.trials_used});
  }
  return out;
}

ErrorReport run(const ExperimentConfig& config, int threads) {
  config.validate();
  const Histogram h = generate(config.dataset);
  const Workload base = make_workload(config.workload, h.shape());
  std::vector<NoiseSpec> specs = config.noise_override
                                     ? std::vector<NoiseSpec>(base.group_count(), *config.noise_override)
                                     : calibrate(config.budget, base);
  const auto workload = std::make_shared<const Workload>(base.with_noise(specs));
  const Matrix queries = workload->query_matrix();
  const Vector truth = queries * h.cells();

  FitOptions opts;
  opts.solver = config.solver;
  opts.gamma = config.gamma;

  const std::size_t algs = config.algorithms.size();
  const int trials = config.trials;
  std::vector<Matrix> sq(algs, Matrix(trials, queries.rows()));
  std::vector<std::vector<char>> ok(algs, std::vector<char>(trials, 0));
  std::vector<std::uint64_t> fingerprints(trials);

  parallel_for(trials, threads, [&](int t) {
    const Rng trial(config.seed, static_cast<std::uint64_t>(t));
    Rng measure_rng = trial.split(0);
    const MeasurementSet m = measure(h, workload, measure_rng);
    fingerprints[t] = m.fingerprint();
    for (std::size_t a = 0; a < algs; ++a) {
      Vector x;
      bool converged = true;
      if (config.algorithms[a] == Algorithm::kClamp) {
        Rng clamp_rng = trial.split(1);
        x = (config.noise_override ? clamp_with(h, *config.noise_override, clamp_rng)
                                   : clamp_mechanism(h, config.budget, clamp_rng))
                .cells();
      } else {
        try {
          FitResult r = run_fitter(config.algorithms[a], m, opts);
          converged = r.converged;
          x = std::move(r.weights);
        } catch (const InfeasibleError&) {
          converged = false;
        }
      }
      ok[a][t] = converged;
      if (converged) sq[a].row(t) = (truth - queries * x).array().square().transpose();
    }
    if (m.fingerprint() != fingerprints[t]) throw std::logic_error("measurements changed during fitting");
  });

  ErrorReport report;
  report.dataset = config.dataset.name();
  report.mechanism = config.noise_override ? config.noise_override->describe() : config.budget.mechanism_name();
  report.budget = config.budget.describe();
  report.trials = trials;
  report.measurement_fingerprints = std::move(fingerprints);
  for (std::size_t a = 0; a < algs; ++a) {
    std::vector<Index> kept;
    for (int t = 0; t < trials; ++t)
      if (ok[a][t]) kept.push_back(t);
    Index offset = 0;
    for (const auto& group : workload->groups()) {
      const Index count = static_cast<Index>(group.queries.size());
      Matrix block(static_cast<Index>(kept.size()), count);
      for (std::size_t i = 0; i < kept.size(); ++i)
        block.row(static_cast<Index>(i)) = sq[a].block(kept[i], offset, 1, count);
      GroupError g;
      g.algorithm = algorithm_name(config.algorithms[a]);
      g.group = group.name;
      for (const auto& q : group.queries) g.query_ids.push_back(q.id());
      g.summary = summarize_rows(block);
      g.trials_used = static_cast<int>(kept.size());
      report.groups.push_back(std::move(g));
      offset += count;
    }
  }
  return report;
}

const DemoRow& DemoSummary::find(const std::string& variant) const {
  for (const auto& r : rows)
    if (r.variant == variant) return r;
  throw InvalidArgument("no demo variant " + variant);
}

DemoSummary uncertainty_demo(Index d, double eps, int trials, std::uint64_t seed, int threads) {
  if (trials < 2) throw InvalidArgument("demo needs at least 2 trials");
  const Histogram h = generate_difficult(d, eps);
  const PrivacyBudget budget = PrivacyBudget::pure(eps);
  const Workload base = make_workload_1d(d);
  const auto full = std::make_shared<const Workload>(base.with_noise(calibrate(budget, base)));
  const Workload ident = make_identity_workload(h.shape());
  const auto nosum = std::make_shared<const Workload>(
      ident.with_noise({NoiseSpec::laplace(l1_sensitivity(ident) / eps)}));
  const double true_sum = h.total();

  static const std::vector<std::string> variants = {"simplex", "clamp", "nnls", "nnls-nosum"};
  const std::size_t nv = variants.size();
  std::vector<Matrix> cell_sq(nv, Matrix(trials, d));
  std::vector<Matrix> sum_sq(nv, Matrix(trials, 1));
  std::vector<std::vector<char>> ok(nv, std::vector<char>(trials, 1));

  parallel_for(trials, threads, [&](int t) {
    const Rng trial(seed, static_cast<std::uint64_t>(t));
    Rng measure_rng = trial.split(0);
    Rng clamp_rng = trial.split(1);
    Rng nosum_rng = trial.split(2);
    const MeasurementSet m = measure(h, full, measure_rng);
    const MeasurementSet m_nosum = measure(h, nosum, nosum_rng);
    for (std::size_t v = 0; v < nv; ++v) {
      Vector x;
      switch (v) {
        case 0: x = fit_simplex(m).weights; break;
        case 1: x = clamp_mechanism(h, budget, clamp_rng).cells(); break;
        case 2: {
          auto r = fit_nnls(m);
          ok[v][t] = r.converged;
          x = std::move(r.weights);
          break;
        }
        default: {
          auto r = fit_nnls(m_nosum);
          ok[v][t] = r.converged;
          x = std::move(r.weights);
          break;
        }
      }
      cell_sq[v].row(t) = (h.cells() - x).array().square().transpose();
      const double e = true_sum - x.sum();
      sum_sq[v](t, 0) = e * e;
    }
  });

  DemoSummary s;
  s.d = d;
  s.eps = eps;
  s.trials = trials;
  s.baseline = 8.0 / (eps * eps);
  for (std::size_t v = 0; v < nv; ++v) {
    std::vector<Index> kept;
    for (int t = 0; t < trials; ++t)
      if (ok[v][t]) kept.push_back(t);
    Matrix cells(static_cast<Index>(kept.size()), d);
    Matrix sums(static_cast<Index>(kept.size()), 1);
    for (std::size_t i = 0; i < kept.size(); ++i) {
      cells.row(static_cast<Index>(i)) = cell_sq[v].row(kept[i]);
      sums(static_cast<Index>(i), 0) = sum_sq[v](kept[i], 0);
    }
    const StderrSummary c = summarize_rows(cells);
    const StderrSummary sm = summarize_rows(sums);
    s.rows.push_back({variants[v], c.max, c.max_stderr, sm.total, sm.total_stderr,
                      static_cast<int>(kept.size())});
  }
  return s;
}

std::string format_demo(const DemoSummary& s) {
  std::ostringstream out;
  out << "difficult dataset: d=" << s.d << " eps=" << format_double(s.eps) << " trials=" << s.trials
      << "\nlaplace baseline 8/eps^2 = " << format_double(s.baseline) << "\n\n"
      << "| variant | C^2 (max point MSE) | D^2 (sum MSE) | trials used |\n"
      << "|---|---|---|---|\n";
  char buf[160];
  for (const auto& r : s.rows) {
    std::snprintf(buf, sizeof(buf), "| %s | %.3f ± %.3f | %.3f ± %.3f | %d |\n", r.variant.c_str(),
                  r.c2, r.c2_stderr, r.d2, r.d2_stderr, r.trials_used);
    out << buf;
  }
  return out.str();
}

}  // namespace dpfit
