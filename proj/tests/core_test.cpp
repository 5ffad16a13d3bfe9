#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "dpfit/core.hpp"
#include "dpfit/error.hpp"
#include "dpfit/format.hpp"
#include "dpfit/rng.hpp"

namespace dpfit {
namespace {

TEST(Histogram, RejectsNegativeAndNonFiniteCells) {
  EXPECT_THROW(Histogram(Vector::Constant(3, -1.0)), InvalidArgument);
  Vector v = Vector::Ones(3);
  v[1] = std::nan("");
  EXPECT_THROW(Histogram{v}, InvalidArgument);
  v[1] = INFINITY;
  EXPECT_THROW(Histogram{v}, InvalidArgument);
}

TEST(Histogram, ValidatesShape) {
  EXPECT_THROW(Histogram(Vector::Ones(6), Shape{4, 2}), DimensionError);
  EXPECT_THROW(Histogram(Vector::Ones(8), Shape{2, 2, 2}), DimensionError);
  EXPECT_THROW(Histogram(Vector::Ones(0), Shape{0}), DimensionError);
  const Histogram h(Vector::Ones(6), Shape{2, 3});
  EXPECT_EQ(h.rows(), 2);
  EXPECT_EQ(h.cols(), 3);
  EXPECT_EQ(h.dims(), 2);
}

TEST(Histogram, FromMatrixIsRowMajor) {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  const Histogram h = Histogram::from_matrix(m);
  EXPECT_EQ(h[1], 2.0);
  EXPECT_EQ(h[3], 4.0);
  EXPECT_EQ(h(1, 2), 6.0);
  EXPECT_EQ(h.total(), 21.0);
  EXPECT_EQ(h.reshaped(Shape{6}).dims(), 1);
}

TEST(CountingQuery, RequiresBinaryIndicator) {
  Vector ind(3);
  ind << 1, 0.5, 0;
  EXPECT_THROW(CountingQuery("q", ind), InvalidArgument);
  EXPECT_THROW(CountingQuery::over_cells("q", 3, {3}), DimensionError);
  const auto q = CountingQuery::over_cells("q", 4, {0, 2});
  EXPECT_EQ(evaluate(q, Histogram(Vector::LinSpaced(4, 1, 4))), 4.0);
  EXPECT_THROW(evaluate(q, Vector::Ones(5)), DimensionError);
}

TEST(Workload, OneDimensionalLayout) {
  const Workload w = make_workload_1d(5);
  ASSERT_EQ(w.group_count(), 2u);
  EXPECT_EQ(w.groups()[0].name, "sum");
  EXPECT_EQ(w.groups()[1].name, "identity");
  EXPECT_EQ(w.query_count(), 6u);
  EXPECT_EQ(w.groups()[1].queries[3].id(), "id[3]");
  EXPECT_DOUBLE_EQ(l1_sensitivity(w), 2.0);
  EXPECT_DOUBLE_EQ(l2_sensitivity(w), std::sqrt(2.0));
}

TEST(Workload, TwoDimensionalLayout) {
  const Workload w = make_workload_2d(3, 4);
  ASSERT_EQ(w.group_count(), 4u);
  EXPECT_EQ(w.groups()[2].name, "marg1");
  EXPECT_EQ(w.groups()[2].queries.size(), 3u);
  EXPECT_EQ(w.groups()[3].queries.size(), 4u);
  EXPECT_DOUBLE_EQ(l1_sensitivity(w), 4.0);
  EXPECT_DOUBLE_EQ(l2_sensitivity(w), 2.0);

  Matrix m(3, 4);
  m << 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12;
  const Histogram h = Histogram::from_matrix(m);
  EXPECT_EQ(evaluate(w.groups()[2].queries[1], h), 26.0);  // row 1
  EXPECT_EQ(evaluate(w.groups()[3].queries[2], h), 21.0);  // column 2
  EXPECT_EQ(w.query_matrix().rows(), 1 + 12 + 3 + 4);
}

TEST(Workload, RejectsBadGroups) {
  const auto q0 = CountingQuery::over_cells("a", 3, {0, 1});
  const auto q1 = CountingQuery::over_cells("b", 3, {1, 2});
  EXPECT_THROW(Workload(Shape{3}, {{"g", {q0, q1}, std::nullopt}}), InvalidArgument);
  EXPECT_THROW(Workload(Shape{3}, {{"g", {q0}, std::nullopt}, {"g", {q1}, std::nullopt}}),
               InvalidArgument);
  EXPECT_THROW(Workload(Shape{3}, {{"g", {}, std::nullopt}}), InvalidArgument);
  EXPECT_THROW(Workload(Shape{4}, {{"g", {q0}, std::nullopt}}), DimensionError);
}

TEST(Workload, NoiseAttachment) {
  const Workload w = make_workload_1d(3);
  EXPECT_FALSE(w.calibrated());
  EXPECT_THROW(w.with_noise({NoiseSpec::zero()}), InvalidArgument);
  const Workload c = w.with_noise({NoiseSpec::laplace(1), NoiseSpec::laplace(2)});
  EXPECT_TRUE(c.calibrated());
  EXPECT_EQ(c.groups()[1].noise->scale(), 2.0);
  EXPECT_EQ(c.find_group("identity"), 1u);
  EXPECT_FALSE(c.find_group("marg1"));
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  Rng a(7, 3), b(7, 3), c(7, 4), d(8, 3);
  const auto x = a();
  EXPECT_EQ(x, b());
  EXPECT_NE(x, c());
  EXPECT_NE(x, d());
  const Rng parent(1, 1);
  Rng s0 = parent.split(0), s0b = parent.split(0), s1 = parent.split(1);
  EXPECT_EQ(s0(), s0b());
  EXPECT_NE(parent.split(0)(), s1());
}

TEST(Rng, UniformStaysInOpenInterval) {
  Rng r(1);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000, 0.5, 0.005);
}

TEST(Format, DoublesRoundTripExactly) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5e17, 5e-324}) {
    double back = 0.0;
    ASSERT_TRUE(parse_double(format_double(v), back));
    EXPECT_EQ(back, v);
  }
  double out = 0.0;
  EXPECT_FALSE(parse_double("1.5x", out));
  EXPECT_FALSE(parse_double("", out));
  EXPECT_TRUE(parse_double("nan", out));
  EXPECT_TRUE(std::isnan(out));
}

}  // namespace
}  // namespace dpfit
