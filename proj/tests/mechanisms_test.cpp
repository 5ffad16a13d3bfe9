#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "dpfit/error.hpp"
#include "dpfit/mechanisms.hpp"

namespace dpfit {
namespace {

std::shared_ptr<const Workload> calibrated(const Workload& w, const PrivacyBudget& b) {
  return std::make_shared<const Workload>(w.with_noise(calibrate(b, w)));
}

TEST(PrivacyBudget, ValidatesParameters) {
  EXPECT_THROW(PrivacyBudget::pure(0), InvalidArgument);
  EXPECT_THROW(PrivacyBudget::zcdp(-1), InvalidArgument);
  EXPECT_THROW(PrivacyBudget::approx(1, 0), InvalidArgument);
  EXPECT_THROW(PrivacyBudget::approx(1, 1), InvalidArgument);
  EXPECT_EQ(PrivacyBudget::pure(1).describe(), "eps=1");
  EXPECT_EQ(PrivacyBudget::zcdp(0.5).describe(), "rho=0.5");
  EXPECT_EQ(PrivacyBudget::approx(1, 1e-6).describe(), "eps=1;delta=1e-06");
  EXPECT_EQ(PrivacyBudget::approx(1, 1e-6).mechanism_name(), "tdgeo");
}

TEST(Calibrate, PureUsesL1Sensitivity) {
  const auto s1 = calibrate(PrivacyBudget::pure(1), make_workload_1d(100));
  ASSERT_EQ(s1.size(), 2u);
  EXPECT_EQ(s1[0], NoiseSpec::laplace(2.0));
  EXPECT_EQ(s1[1], s1[0]);
  EXPECT_DOUBLE_EQ(s1[0].variance(), 8.0);
  const auto s2 = calibrate(PrivacyBudget::pure(0.5), make_workload_2d(10, 10));
  EXPECT_EQ(s2[3], NoiseSpec::laplace(8.0));
}

TEST(Calibrate, ZcdpUsesL2Sensitivity) {
  EXPECT_DOUBLE_EQ(calibrate(PrivacyBudget::zcdp(0.5), make_workload_1d(100))[0].variance(), 2.0);
  EXPECT_DOUBLE_EQ(calibrate(PrivacyBudget::zcdp(0.5), make_workload_2d(10, 10))[0].variance(), 4.0);
}

TEST(Calibrate, ApproxUsesTruncatedGeometric) {
  const auto s = calibrate(PrivacyBudget::approx(1, 1e-6), make_workload_1d(100))[0];
  EXPECT_EQ(s.kind(), NoiseKind::kTruncatedDoubleGeometric);
  EXPECT_DOUBLE_EQ(s.rate(), 0.5);
  EXPECT_EQ(s.bound(), static_cast<std::int64_t>(std::ceil(2.0 * std::log(4e6) + 1.0)));
}

TEST(Measure, AnswersAreTruthPlusNoise) {
  const Histogram h(Vector::LinSpaced(5, 0, 40));
  const auto w = calibrated(make_workload_1d(5), PrivacyBudget::pure(1));
  const int trials = 20000;
  Vector mean = Vector::Zero(6);
  for (int t = 0; t < trials; ++t) {
    Rng rng(9, t);
    const MeasurementSet m = measure(h, w, rng);
    for (std::size_t i = 0; i < m.size(); ++i) mean[static_cast<Index>(i)] += m.entries()[i].answer;
  }
  mean /= trials;
  EXPECT_NEAR(mean[0], 100.0, 5 * std::sqrt(8.0 / trials));
  for (Index i = 0; i < 5; ++i) EXPECT_NEAR(mean[i + 1], h[i], 5 * std::sqrt(8.0 / trials));
}

TEST(Measure, DeterministicPerStream) {
  const Histogram h(Vector::Ones(4));
  const auto w = calibrated(make_workload_1d(4), PrivacyBudget::zcdp(1));
  Rng a(1, 2), b(1, 2), c(1, 3);
  const auto ma = measure(h, w, a);
  EXPECT_EQ(ma.fingerprint(), measure(h, w, b).fingerprint());
  EXPECT_NE(ma.fingerprint(), measure(h, w, c).fingerprint());
  EXPECT_EQ(ma.group_entries(1).size(), 4u);
  EXPECT_EQ(ma.entries()[2].query_id, "id[1]");
}

TEST(Measure, RequiresCalibrationAndMatchingShape) {
  const auto raw = std::make_shared<const Workload>(make_workload_1d(3));
  Rng rng(1);
  EXPECT_THROW(measure(Histogram(Vector::Ones(3)), raw, rng), InvalidArgument);
  EXPECT_THROW(MeasurementSet(raw, {1, 2, 3, 4}), InvalidArgument);
  const auto w = calibrated(make_workload_1d(3), PrivacyBudget::pure(1));
  EXPECT_THROW(measure(Histogram(Vector::Ones(4)), w, rng), DimensionError);
  EXPECT_THROW(MeasurementSet(w, {1, 2}), DimensionError);
}

TEST(ClampMechanism, OutputIsNonnegativeAndIntegerShifted) {
  const Histogram h(Vector::Zero(50));
  Rng rng(4);
  for (const auto& b : {PrivacyBudget::pure(1), PrivacyBudget::zcdp(0.5)}) {
    const Histogram out = clamp_mechanism(h, b, rng);
    EXPECT_GE(out.cells().minCoeff(), 0.0);
    for (Index i = 0; i < out.size(); ++i) EXPECT_EQ(out[i], std::round(out[i]));
  }
  EXPECT_THROW(clamp_mechanism(h, PrivacyBudget::approx(1, 1e-6), rng), InvalidArgument);
}

}  // namespace
}  // namespace dpfit
