#include <gtest/gtest.h>

#include <cmath>

#include "dpfit/error.hpp"
#include "dpfit/solvers/box_qp.hpp"
#include "dpfit/solvers/order_stats.hpp"
#include "dpfit/solvers/quadratic_fit.hpp"
#include "dpfit/solvers/water_fill.hpp"
#include "oracles.hpp"

namespace dpfit {
namespace {

Vector unit(Index n, Index i) { return Vector::Unit(n, i); }

QuadraticFitProblem identity_problem(const Vector& a, double w = 1.0) {
  QuadraticFitProblem p;
  p.dim = a.size();
  for (Index i = 0; i < a.size(); ++i) p.terms.push_back({unit(a.size(), i), a[i], w});
  return p;
}

QuadraticFitProblem from_design(const Matrix& a, const Vector& b, const Vector& w) {
  QuadraticFitProblem p;
  p.dim = a.cols();
  for (Index r = 0; r < a.rows(); ++r) p.terms.push_back({a.row(r).transpose(), b[r], w[r]});
  return p;
}

TEST(SolveWls, SingleTerm) {
  QuadraticFitProblem p;
  p.dim = 1;
  p.nonneg = false;
  p.terms.push_back({Vector::Ones(1), 5.0, 1.0});
  EXPECT_NEAR(solve_wls(p).x[0], 5.0, 1e-12);
}

TEST(SolveWls, SumPlusIdentitySplitsResidual) {
  QuadraticFitProblem p;
  p.dim = 2;
  p.nonneg = false;
  p.terms = {{Vector::Ones(2), 10.0, 1.0}, {unit(2, 0), 3.0, 1.0}, {unit(2, 1), 5.0, 1.0}};
  const auto r = solve_wls(p);
  EXPECT_NEAR(r.x[0], 11.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.x[1], 17.0 / 3.0, 1e-12);
  EXPECT_FALSE(r.rank_deficient);
  for (auto& t : p.terms) t.weight *= 37.0;
  EXPECT_NEAR((solve_wls(p).x - r.x).cwiseAbs().maxCoeff(), 0.0, 1e-12);
}

TEST(SolveWls, RankDeficientGivesMinimumNorm) {
  QuadraticFitProblem p;
  p.dim = 2;
  p.nonneg = false;
  p.terms = {{Vector::Ones(2), 4.0, 1.0}};
  const auto r = solve_wls(p);
  EXPECT_TRUE(r.rank_deficient);
  EXPECT_EQ(r.rank, 1);
  EXPECT_NEAR(r.x[0], 2.0, 1e-12);
  EXPECT_NEAR(r.x[1], 2.0, 1e-12);
}

TEST(SolveNnls, ClampsNegativeTargets) {
  Vector a(2);
  a << -1, -2;
  const auto r = solve_nnls(identity_problem(a), {});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.x, Vector::Zero(2));
}

TEST(SolveNnls, MatchesActiveSetEnumeration) {
  Rng rng(2024);
  for (int instance = 0; instance < 100; ++instance) {
    const Index rows = 8;
    const Matrix a = oracle::random_binary_design(rng, rows, 5);
    Vector b(rows), w(rows);
    for (Index r = 0; r < rows; ++r) {
      b[r] = 4.0 * oracle::gaussian(rng) + 1.0;
      w[r] = 0.2 + rng.uniform();
    }
    const auto p = from_design(a, b, w);
    const auto r = solve_nnls(p, {});
    ASSERT_TRUE(r.converged);
    const double best = oracle::nnls_by_enumeration(a, b, w);
    EXPECT_NEAR(p.objective(r.x), best, 1e-6) << "instance " << instance;
  }
}

TEST(SolveNnls, SatisfiesKktConditions) {
  Rng rng(77);
  const SolverSettings s;
  for (int instance = 0; instance < 30; ++instance) {
    const Matrix a = oracle::random_binary_design(rng, 30, 12);
    Vector b(30), w(30);
    for (Index r = 0; r < 30; ++r) {
      b[r] = 3.0 * oracle::gaussian(rng);
      w[r] = 1.0 / (1.0 + 3.0 * rng.uniform());
    }
    const auto p = from_design(a, b, w);
    const auto r = solve_nnls(p, s);
    ASSERT_TRUE(r.converged);
    EXPECT_GE(r.x.minCoeff(), 0.0);
    // Gradient of ½Σw(q·x − a)².
    const Vector g = a.transpose() * (w.asDiagonal() * (a * r.x - b));
    for (Index i = 0; i < r.x.size(); ++i) {
      if (r.x[i] > 0) EXPECT_LE(std::abs(g[i]), s.abs_tol * 10) << i;
      else EXPECT_GE(g[i], -s.abs_tol * 10) << i;
    }
    EXPECT_LE(nnls_kkt_residual(p, r.x), s.abs_tol * 10);
  }
}

TEST(SolveNnls, EqualityAgreesWithWaterFill) {
  Rng rng(99);
  for (int instance = 0; instance < 200; ++instance) {
    const Index n = 1 + static_cast<Index>(rng() % 8);
    Vector a(n);
    for (Index i = 0; i < n; ++i) a[i] = 3.0 * oracle::gaussian(rng);
    const double target = 6.0 * rng.uniform();
    auto p = identity_problem(a);
    p.equalities.push_back({Vector::Ones(n), target, 0.0});
    const auto r = solve_nnls(p, {});
    ASSERT_TRUE(r.converged) << instance;
    EXPECT_LE((r.x - simplex_water_fill(a, target)).cwiseAbs().maxCoeff(), 1e-6) << instance;
  }
}

TEST(SolveNnls, EqualityBandsAndCapsHold) {
  Vector a(4);
  a << 10, 0, -3, 7;
  auto p = identity_problem(a);
  p.equalities.push_back({Vector::Ones(4), 5.0, 1e-3});
  p.linf_caps.push_back({unit(4, 3), 7.0, 5.5, 1.0});
  const SolverSettings s;
  const auto r = solve_nnls(p, s);
  ASSERT_TRUE(r.converged);
  EXPECT_LE(std::abs(r.x.sum() - 5.0), 1e-3 + s.abs_tol);
  EXPECT_LE(std::abs(7.0 - r.x[3]), 5.5 + s.abs_tol);
  EXPECT_LE(r.max_violation, s.abs_tol);
  EXPECT_GE(r.x.minCoeff(), 0.0);
}

TEST(SolveNnls, InfeasibleEqualityThrows) {
  auto p = identity_problem(Vector::Ones(3));
  p.equalities.push_back({Vector::Ones(3), -2.0, 0.5});
  EXPECT_THROW(solve_nnls(p, {}), InfeasibleError);
}

TEST(WaterFill, WorkedExamples) {
  Vector a(3);
  a << 3, -1, 2;
  EXPECT_DOUBLE_EQ(water_level(a, 4.0), 0.5);
  const Vector x = simplex_water_fill(a, 4.0);
  EXPECT_NEAR(x[0], 2.5, 1e-12);
  EXPECT_EQ(x[1], 0.0);
  EXPECT_NEAR(x[2], 1.5, 1e-12);

  Vector b(3);
  b << 1, 2, 3;
  EXPECT_NEAR((simplex_water_fill(b, 6.0) - b).cwiseAbs().maxCoeff(), 0.0, 1e-12);
  EXPECT_NEAR(simplex_water_fill(Vector::Constant(1, 5.0), 2.0)[0], 2.0, 1e-12);
  EXPECT_EQ(simplex_water_fill(b, 0.0), Vector::Zero(3));
  EXPECT_THROW(simplex_water_fill(b, -1.0), InvalidArgument);
}

TEST(WaterFill, MatchesBisectionOracle) {
  Rng rng(5);
  for (int instance = 0; instance < 200; ++instance) {
    const Index n = 1 + static_cast<Index>(rng() % 20);
    Vector a(n);
    for (Index i = 0; i < n; ++i) a[i] = 10.0 * oracle::gaussian(rng);
    const double target = 30.0 * rng.uniform() + 1e-3;
    const double gamma = oracle::water_level_by_bisection(a, target);
    const Vector x = simplex_water_fill(a, target);
    EXPECT_NEAR(water_level(a, target), gamma, 1e-9);
    EXPECT_NEAR(x.sum(), target, 1e-10);
    EXPECT_LE((x - (a.array() - gamma).max(0.0).matrix()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(WaterFill, AcceptsExpressionsAndFloat) {
  Eigen::Matrix3f m;
  m << 3, 0, 0, -1, 0, 0, 2, 0, 0;
  const Eigen::VectorXf x = simplex_water_fill(m.col(0), 4.0f);
  EXPECT_NEAR(x[0], 2.5f, 1e-6f);
  EXPECT_NEAR(x[2], 1.5f, 1e-6f);
}

TEST(BoxQp, FloatInstantiation) {
  Eigen::Matrix2f h;
  h << 2, 0, 0, 2;
  Eigen::Vector2f f(4, -2), lo(0, 0), hi(1, 1);
  BoxQp<float> qp(h, f, lo, hi);
  const auto r = qp.solve(Eigen::Vector2f::Zero(), 1e-6f, 100);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0f, 1e-5f);
  EXPECT_NEAR(r.x[1], 0.0f, 1e-5f);
}

TEST(SolveMinmax, WorkedExamples) {
  const SolverSettings s;
  const auto one = solve_minmax(identity_problem(Vector::Constant(1, -3.0)), s);
  EXPECT_NEAR(one.dist, 3.0, 1e-7);
  EXPECT_NEAR(one.x[0], 0.0, 1e-7);

  QuadraticFitProblem dup;
  dup.dim = 1;
  dup.terms = {{Vector::Ones(1), 4.0, 1.0}, {Vector::Ones(1), 6.0, 1.0}};
  const auto two = solve_minmax(dup, s);
  EXPECT_NEAR(two.dist, 1.0, 1e-6);
  EXPECT_NEAR(two.x[0], 5.0, 1e-6);

  Vector a(3);
  a << 1, 2, 3;
  auto consistent = identity_problem(a);
  consistent.terms.push_back({Vector::Ones(3), 6.0, 0.5});
  EXPECT_NEAR(solve_minmax(consistent, s).dist, 0.0, 1e-6);
}

TEST(SolveMinmax, NoRandomProbeBeatsTheOptimum) {
  Rng rng(31);
  const SolverSettings s;
  for (int instance = 0; instance < 5; ++instance) {
    const Matrix a = oracle::random_binary_design(rng, 9, 4);
    Vector b(9), w(9);
    for (Index r = 0; r < 9; ++r) {
      b[r] = 5.0 * oracle::gaussian(rng) + 2.0;
      w[r] = 0.25 + rng.uniform();
    }
    const auto p = from_design(a, b, w);
    const auto r = solve_minmax(p, s);
    ASSERT_TRUE(r.converged);
    EXPECT_NEAR(max_normalized_deviation(p, r.x), r.dist, 1e-9);
    const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
    for (int probe = 0; probe < 10000; ++probe) {
      Vector x(4);
      for (Index i = 0; i < 4; ++i) {
        x[i] = probe % 2 == 0 ? scale * rng.uniform()
                              : std::max(0.0, r.x[i] + 0.05 * oracle::gaussian(rng));
      }
      ASSERT_GE(max_normalized_deviation(p, x), r.dist - s.rel_tol * std::max(1.0, r.dist));
    }
  }
}

TEST(OrderStats, WorkedExamples) {
  const auto lap = NoiseSpec::laplace(1);
  EXPECT_NEAR(max_exceed_prob(lap, 1, 0.0), 0.5, 1e-15);
  EXPECT_NEAR(max_order_quantile(lap, 2, 0.5), -std::log(2.0 * (1.0 - std::pow(2.0, -0.5))), 1e-12);
  EXPECT_NEAR(max_order_quantile(lap, 2, 0.5), 0.5347999967, 1e-9);
  EXPECT_NEAR(max_exceed_prob(lap, 2, 0.5347999967), 0.5, 1e-9);
  // Φ⁻¹(0.5^{1/100}).
  EXPECT_NEAR(max_order_quantile(NoiseSpec::gaussian(1), 100, 0.5), 2.462037838, 1e-8);
  EXPECT_NEAR(max_order_quantile(NoiseSpec::gaussian(1), 100, 0.5),
              oracle::normal_quantile_by_bisection(std::pow(0.5, 0.01)), 1e-9);
  EXPECT_NEAR(max_order_quantile(NoiseSpec::gaussian(3), 1, 0.5), 0.0, 1e-12);
}

TEST(OrderStats, Limits) {
  for (const auto& s : {NoiseSpec::laplace(2), NoiseSpec::gaussian(1), NoiseSpec::double_geometric(1)}) {
    EXPECT_LT(max_exceed_prob(s, 10, 1e6), 1e-12);
    EXPECT_GT(max_exceed_prob(s, 10, -1e6), 1.0 - 1e-12);
  }
  EXPECT_THROW(max_exceed_prob(NoiseSpec::laplace(1), 0, 1.0), InvalidArgument);
  EXPECT_THROW(max_order_quantile(NoiseSpec::laplace(1), 1, 1.0), InvalidArgument);
}

TEST(OrderStats, QuantileAndExceedanceAreMutualInverses) {
  const std::vector<NoiseSpec> specs = {NoiseSpec::laplace(1), NoiseSpec::laplace(2.5),
                                        NoiseSpec::gaussian(1), NoiseSpec::gaussian(4)};
  for (const auto& s : specs)
    for (int j : {1, 2, 7, 100, 1000})
      for (double p : {0.01, 0.1, 0.5, 0.9, 0.99, 0.999})
        EXPECT_NEAR(max_exceed_prob(s, j, max_order_quantile(s, j, p)), 1.0 - p, 1e-9)
            << s.describe() << " j=" << j << " p=" << p;
}

TEST(OrderStats, DiscreteQuantileBracketsTheLevel) {
  for (const auto& s : {NoiseSpec::double_geometric(0.5), NoiseSpec::discrete_gaussian(2.0),
                        NoiseSpec::truncated_double_geometric(0.5, 12)})
    for (int j : {1, 5, 50})
      for (double p : {0.1, 0.5, 0.9}) {
        const double q = max_order_quantile(s, j, p);
        // P(max ≤ q) ≥ p and P(max ≤ q − 1) < p.
        EXPECT_GE(1.0 - max_exceed_prob(s, j, q + 1), p - 1e-12) << s.describe();
        EXPECT_LT(1.0 - max_exceed_prob(s, j, q), p) << s.describe();
      }
}

TEST(OrderStats, MaxLaplaceMeanWithinEnvelope) {
  Rng rng(8);
  const auto lap = NoiseSpec::laplace(1);
  double total = 0.0;
  for (int t = 0; t < 10000; ++t) {
    double m = 0.0;
    for (int i = 0; i < 100; ++i) m = std::max(m, std::abs(lap.sample(rng)));
    total += m;
  }
  EXPECT_LE(total / 10000, std::log(100.0) + 1.0);
}

}  // namespace
}  // namespace dpfit
