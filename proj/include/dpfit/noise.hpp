#pragma once

#include <cstdint>
#include <string>

#include "dpfit/rng.hpp"

namespace dpfit {

enum class NoiseKind {
  kLaplace,
  kGaussian,
  kDoubleGeometric,
  kTruncatedDoubleGeometric,
  kDiscreteGaussian,
  kZero,  // test-only point mass at 0
};

// An additive noise distribution. Immutable; the variance is computed once
// from the parameters (exact closed form or exact finite summation).
class NoiseSpec {
 public:
  static NoiseSpec laplace(double scale);
  static NoiseSpec gaussian(double variance);
  // Double geometric with pmf proportional to exp(-rate*|k|).
  static NoiseSpec double_geometric(double rate);
  // Double geometric clipped to [-bound, bound]; clipped mass sits on the
  // boundary atoms.
  static NoiseSpec truncated_double_geometric(double rate, std::int64_t bound);
  // Discrete Gaussian with pmf proportional to exp(-k^2 / (2*sigma2)).
  static NoiseSpec discrete_gaussian(double sigma2);
  static NoiseSpec zero();

  NoiseKind kind() const { return kind_; }
  double scale() const { return param_; }    // Laplace b
  double rate() const { return param_; }     // DGeo / TDGeo
  double sigma2() const { return param_; }   // Gaussian / DGauss
  std::int64_t bound() const { return bound_; }

  double variance() const { return variance_; }
  double stddev() const;
  bool is_discrete() const;

  // Variance used to weight fits. A zero-variance spec weights as 1 so that
  // noiseless measurements still define a well-posed least-squares problem.
  double fit_variance() const { return variance_ > 0 ? variance_ : 1.0; }

  // P(X = k); zero for continuous kinds.
  double pmf(std::int64_t k) const;
  // P(X <= t).
  double cdf(double t) const;
  // P(X < t). Differs from cdf only at atoms of discrete kinds.
  double cdf_below(double t) const;
  // log P(X < t), accurate when the probability is close to 1.
  double log_cdf_below(double t) const;
  // Smallest t with P(X <= t) >= u, where tail = 1 - u is supplied
  // separately to keep precision for u near 1.
  double quantile(double u, double tail) const;
  double quantile(double u) const { return quantile(u, 1.0 - u); }

  double sample(Rng& rng) const;

  std::string describe() const;

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;

 private:
  NoiseSpec(NoiseKind kind, double param, std::int64_t bound);

  // Upper tail P(X > t) for the continuous kinds.
  double continuous_sf(double t) const;
  // log P(X <= k) and P(X > k) for integer k, discrete kinds.
  double discrete_sf(std::int64_t k) const;
  double discrete_cdf(std::int64_t k) const;

  NoiseKind kind_;
  double param_;
  std::int64_t bound_;
  double variance_;
};

// Standard normal inverse CDF evaluated at 1 - tail, accurate for small tail.
double normal_upper_quantile(double tail);
double normal_quantile(double p);

}  // namespace dpfit
