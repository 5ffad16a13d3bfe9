#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dpfit/error.hpp"
#include "dpfit/solvers/box_qp.hpp"
#include "dpfit/solvers/quadratic_fit.hpp"
#include "dpfit/solvers/settings.hpp"

namespace dpfit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Two-sided linear constraints lo ≤ Cx ≤ hi gathered from equalities and caps.
struct Bands {
  Matrix c;
  Vector lo;
  Vector hi;
};

Bands collect_bands(const QuadraticFitProblem& p) {
  const auto k = static_cast<Index>(p.equalities.size() + p.linf_caps.size());
  Bands b{Matrix(k, p.dim), Vector(k), Vector(k)};
  Index row = 0;
  for (const auto& e : p.equalities) {
    b.c.row(row) = e.indicator.transpose();
    b.lo[row] = e.rhs - e.slack;
    b.hi[row] = e.rhs + e.slack;
    ++row;
  }
  for (const auto& cap : p.linf_caps) {
    b.c.row(row) = cap.indicator.transpose();
    b.lo[row] = cap.center - cap.cap * cap.scale;
    b.hi[row] = cap.center + cap.cap * cap.scale;
    ++row;
  }
  return b;
}

double band_violation(const Bands& b, const Vector& x) {
  if (b.c.rows() == 0) return 0.0;
  const Vector v = b.c * x;
  return std::max({0.0, (b.lo - v).maxCoeff(), (v - b.hi).maxCoeff()});
}

}  // namespace

void SolverSettings::validate() const {
  if (!(abs_tol > 0) || !(rel_tol > 0)) throw InvalidArgument("solver tolerances must be positive");
  if (max_iters < 1) throw InvalidArgument("solver max_iters must be >= 1");
  if (!(eq_slack >= 0) || !(linf_slack >= 0)) throw InvalidArgument("solver slacks must be >= 0");
}

void QuadraticFitProblem::validate() const {
  if (dim < 1) throw DimensionError("fit problem needs at least one variable");
  for (const auto& t : terms) {
    if (t.indicator.size() != dim) throw DimensionError("term indicator has the wrong size");
    if (!(t.weight > 0) || !std::isfinite(t.weight))
      throw InvalidArgument("term weights must be positive and finite");
    if (!std::isfinite(t.target)) throw InvalidArgument("term target must be finite");
  }
  for (const auto& e : equalities) {
    if (e.indicator.size() != dim) throw DimensionError("equality indicator has the wrong size");
    if (!(e.slack >= 0)) throw InvalidArgument("equality slack must be >= 0");
  }
  for (const auto& c : linf_caps) {
    if (c.indicator.size() != dim) throw DimensionError("cap indicator has the wrong size");
    if (!(c.cap >= 0) || !(c.scale > 0)) throw InvalidArgument("caps need cap >= 0 and scale > 0");
  }
}

Matrix QuadraticFitProblem::design() const {
  Matrix a(static_cast<Index>(terms.size()), dim);
  for (std::size_t i = 0; i < terms.size(); ++i)
    a.row(static_cast<Index>(i)) = terms[i].indicator.transpose();
  return a;
}

Vector QuadraticFitProblem::targets() const {
  Vector b(static_cast<Index>(terms.size()));
  for (std::size_t i = 0; i < terms.size(); ++i) b[static_cast<Index>(i)] = terms[i].target;
  return b;
}

Vector QuadraticFitProblem::weights() const {
  Vector w(static_cast<Index>(terms.size()));
  for (std::size_t i = 0; i < terms.size(); ++i) w[static_cast<Index>(i)] = terms[i].weight;
  return w;
}

double QuadraticFitProblem::objective(const Vector& x) const {
  double total = 0.0;
  for (const auto& t : terms) {
    const double r = t.target - t.indicator.dot(x);
    total += t.weight * r * r;
  }
  return total;
}

double QuadraticFitProblem::max_violation(const Vector& x) const {
  return band_violation(collect_bands(*this), x);
}

double max_normalized_deviation(const QuadraticFitProblem& p, const Vector& x) {
  double worst = 0.0;
  for (const auto& t : p.terms)
    worst = std::max(worst, std::abs(t.target - t.indicator.dot(x)) * std::sqrt(t.weight));
  return worst;
}

double nnls_kkt_residual(const QuadraticFitProblem& p, const Vector& x) {
  const Matrix a = p.design();
  const Vector w = p.weights();
  // Gradient of ½ Σ w (q·x − a)².
  const Vector g = a.transpose() * (w.asDiagonal() * (a * x - p.targets()));
  double r = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    if (p.nonneg && x[i] <= 0.0) {
      r = std::max(r, -g[i]);
    } else {
      r = std::max(r, std::abs(g[i]));
    }
  }
  return r;
}

WlsResult solve_wls(const QuadraticFitProblem& p) {
  p.validate();
  const Vector sw = p.weights().cwiseSqrt();
  const Matrix a = sw.asDiagonal() * p.design();
  const Vector b = sw.asDiagonal() * p.targets();
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  WlsResult out;
  out.x = a.rows() > 0 ? Vector(cod.solve(b)) : Vector(Vector::Zero(p.dim));
  out.rank = a.rows() > 0 ? cod.rank() : 0;
  out.rank_deficient = out.rank < p.dim;
  return out;
}

NnlsResult solve_nnls(const QuadraticFitProblem& p, const SolverSettings& s) {
  p.validate();
  s.validate();
  const Index n = p.dim;
  const Matrix a = p.design();
  const Vector w = p.weights();
  const Matrix h = a.transpose() * w.asDiagonal() * a;
  const Vector f = a.transpose() * (w.asDiagonal() * p.targets());
  const Vector x_lo = Vector::Constant(n, p.nonneg ? 0.0 : -kInf);
  const Vector x_hi = Vector::Constant(n, kInf);

  const Bands bands = collect_bands(p);
  const Index k = bands.c.rows();

  // Indicators are nonnegative, so with x ≥ 0 an upper band below zero can
  // never be met.
  if (p.nonneg) {
    for (Index r = 0; r < k; ++r) {
      if (bands.hi[r] < -s.abs_tol && bands.c.row(r).minCoeff() >= 0.0)
        throw InfeasibleError("constraint " + std::to_string(r) +
                              " requires a negative total under nonnegativity");
      if (bands.lo[r] > bands.hi[r]) throw InfeasibleError("empty constraint band");
    }
  }

  NnlsResult out;
  if (k == 0) {
    BoxQp<double> qp(h, f, x_lo, x_hi);
    auto res = qp.solve(Vector::Zero(n), s.abs_tol, s.max_iters);
    out.x = std::move(res.x);
    out.converged = res.converged;
    out.iterations = res.iterations;
    out.kkt_residual = res.kkt_residual;
  } else {
    // Augmented Lagrangian on the split Cx = z, lo ≤ z ≤ hi. Each inner
    // problem is a bound-constrained QP in (x, z).
    const Index m = n + k;
    Vector lower(m), upper(m);
    lower << x_lo, bands.lo;
    upper << x_hi, bands.hi;
    const Matrix ctc = bands.c.transpose() * bands.c;

    const double scale = std::max(1.0, h.diagonal().maxCoeff());
    double rho = 10.0 * scale;
    const double rho_max = 1e12 * scale;
    Vector lambda = Vector::Zero(k);
    Vector z(m);
    z << Vector::Zero(n), Vector::Zero(k);
    z.tail(k) = bands.c * z.head(n);
    z = z.cwiseMax(lower).cwiseMin(upper);

    double prev_viol = kInf;
    double viol = kInf;
    bool inner_ok = false;
    for (int outer = 0; outer < 100; ++outer) {
      Matrix haug(m, m);
      haug.topLeftCorner(n, n) = h + rho * ctc;
      haug.topRightCorner(n, k) = -rho * bands.c.transpose();
      haug.bottomLeftCorner(k, n) = -rho * bands.c;
      haug.bottomRightCorner(k, k) = rho * Matrix::Identity(k, k);
      Vector faug(m);
      faug << f - bands.c.transpose() * lambda, lambda;

      BoxQp<double> qp(haug, faug, lower, upper);
      auto res = qp.solve(z, s.abs_tol, s.max_iters);
      out.iterations += res.iterations;
      out.kkt_residual = res.kkt_residual;
      inner_ok = res.converged;
      z = std::move(res.x);

      const Vector resid = bands.c * z.head(n) - z.tail(k);
      viol = resid.cwiseAbs().maxCoeff();
      lambda += rho * resid;
      if (inner_ok && viol <= s.abs_tol) break;
      if (viol > 0.25 * prev_viol) rho = std::min(rho * 10.0, rho_max);
      prev_viol = viol;
    }
    out.x = z.head(n);
    out.converged = inner_ok && viol <= s.abs_tol;
    if (!out.converged && band_violation(bands, out.x) > 1e-4 * (1.0 + bands.hi.cwiseAbs().maxCoeff()))
      throw InfeasibleError("constraint set appears infeasible (violation " +
                            std::to_string(band_violation(bands, out.x)) + ")");
  }
  if (p.nonneg) out.x = out.x.cwiseMax(0.0);
  out.objective = p.objective(out.x);
  out.max_violation = band_violation(bands, out.x);
  return out;
}

MinmaxResult solve_minmax(const QuadraticFitProblem& p, const SolverSettings& s) {
  p.validate();
  s.validate();
  if (p.terms.empty()) throw InvalidArgument("minmax fit needs at least one term");
  if (!p.equalities.empty() || !p.linf_caps.empty())
    throw InvalidArgument("minmax fit takes terms only");

  const Index n = p.dim;
  const Vector sw = p.weights().cwiseSqrt();
  const Matrix a = sw.asDiagonal() * p.design();
  const Vector b = sw.asDiagonal() * p.targets();
  const Index k = a.rows();
  const Index m = n + k;

  // Feasibility at distance t: minimize ½‖Ax − z‖² with x in its bounds and
  // b − t ≤ z ≤ b + t. The optimum is zero exactly when t is attainable.
  Matrix h(m, m);
  h.topLeftCorner(n, n) = a.transpose() * a;
  h.topRightCorner(n, k) = -a.transpose();
  h.bottomLeftCorner(k, n) = -a;
  h.bottomRightCorner(k, k) = Matrix::Identity(k, k);
  const Vector f = Vector::Zero(m);

  auto deviation = [&](const Vector& x) { return (a * x - b).cwiseAbs().maxCoeff(); };

  MinmaxResult out;
  if (p.nonneg) {
    QuadraticFitProblem plain = p;
    out.x = solve_nnls(plain, s).x;
  } else {
    out.x = solve_wls(p).x;
  }
  double best = deviation(out.x);
  double hi = best;
  // With x ≥ 0 and nonnegative indicators every fitted answer is ≥ 0, so a
  // negative target is at least its own magnitude away.
  double lo = 0.0;
  if (p.nonneg && (a.array() >= 0.0).all()) lo = std::max(0.0, (-b).maxCoeff());

  Vector z(m);
  const Vector ax0 = a * out.x;
  z << out.x, ax0.array().max(b.array() - hi).min(b.array() + hi).matrix();
  const double x_floor = p.nonneg ? 0.0 : -kInf;
  Vector lower(m), upper(m);
  lower.head(n).setConstant(x_floor);
  upper.head(n).setConstant(kInf);

  auto tolerance = [&] { return std::max(s.abs_tol, s.rel_tol * hi); };
  const int max_steps = std::min(s.max_iters, 200);
  double t = lo;
  while (hi - lo > tolerance()) {
    if (out.steps >= max_steps) break;
    ++out.steps;
    if (!(t > lo && t < hi)) t = 0.5 * (lo + hi);
    lower.tail(k) = b.array() - t;
    upper.tail(k) = b.array() + t;
    BoxQp<double> qp(h, f, lower, upper);
    auto res = qp.solve(z, 1e-3 * s.abs_tol, s.max_iters);
    z = res.x;
    const Vector x = z.head(n);
    const double dev = deviation(x);
    if (dev < best) {
      best = dev;
      out.x = x;
    }
    // Distance from each fitted answer to its band at this t.
    const Vector ax = a * x;
    const Vector r = (ax.array() - ax.array().max(b.array() - t).min(b.array() + t)).matrix();
    if (r.cwiseAbs().maxCoeff() <= s.abs_tol) {
      hi = t;
      t = 0.5 * (lo + hi);
    } else {
      lo = t;
      // The band-violation norm is convex and decreasing in t, so a Newton
      // step from an infeasible t stays at or below the optimum.
      t += r.squaredNorm() / r.lpNorm<1>();
    }
    hi = std::min(hi, best);
  }
  out.converged = hi - lo <= std::max(s.abs_tol, s.rel_tol * hi);
  out.dist = best;
  return out;
}

}  // namespace dpfit
