#include "dpfit/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dpfit/error.hpp"
#include "dpfit/format.hpp"

namespace dpfit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Half-width of the summation window for discrete Gaussian sums; the mass
// beyond 12 standard deviations is below 1e-31.
std::int64_t dgauss_window(double sigma2) {
  return static_cast<std::int64_t>(std::ceil(12.0 * std::sqrt(sigma2))) + 2;
}

double dgauss_weight(std::int64_t k, double sigma2) {
  const double kk = static_cast<double>(k);
  return std::exp(-kk * kk / (2.0 * sigma2));
}

double dgauss_normalizer(double sigma2) {
  const std::int64_t w = dgauss_window(sigma2);
  double z = 1.0;
  for (std::int64_t k = w; k >= 1; --k) z += 2.0 * dgauss_weight(k, sigma2);
  return z;
}

double compute_variance(NoiseKind kind, double p, std::int64_t bound) {
  switch (kind) {
    case NoiseKind::kLaplace:
      return 2.0 * p * p;
    case NoiseKind::kGaussian:
      return p;
    case NoiseKind::kDoubleGeometric: {
      const double q = std::exp(-p);
      return 2.0 * q / ((1.0 - q) * (1.0 - q));
    }
    case NoiseKind::kTruncatedDoubleGeometric: {
      const double q = std::exp(-p);
      const double c = (1.0 - q) / (1.0 + q);
      const double b = static_cast<double>(bound);
      double v = 2.0 * b * b * std::pow(q, b) / (1.0 + q);
      for (std::int64_t k = bound - 1; k >= 1; --k) {
        const double kk = static_cast<double>(k);
        v += 2.0 * kk * kk * c * std::pow(q, kk);
      }
      return v;
    }
    case NoiseKind::kDiscreteGaussian: {
      const std::int64_t w = dgauss_window(p);
      double num = 0.0;
      for (std::int64_t k = w; k >= 1; --k) {
        const double kk = static_cast<double>(k);
        num += 2.0 * kk * kk * dgauss_weight(k, p);
      }
      return num / dgauss_normalizer(p);
    }
    case NoiseKind::kZero:
      return 0.0;
  }
  return 0.0;
}

double sample_geometric(Rng& rng, double rate) {
  // Number of failures before the first success, P(G = k) ∝ exp(-rate*k).
  return std::floor(-std::log(rng.uniform()) / rate);
}

double sample_double_geometric(Rng& rng, double rate) {
  return sample_geometric(rng, rate) - sample_geometric(rng, rate);
}

}  // namespace

NoiseSpec::NoiseSpec(NoiseKind kind, double param, std::int64_t bound)
    : kind_(kind),
      param_(param),
      bound_(bound),
      variance_(compute_variance(kind, param, bound)) {}

NoiseSpec NoiseSpec::laplace(double scale) {
  if (!(scale > 0) || !std::isfinite(scale))
    throw InvalidArgument("laplace scale must be positive and finite");
  return NoiseSpec(NoiseKind::kLaplace, scale, 0);
}

NoiseSpec NoiseSpec::gaussian(double variance) {
  if (!(variance > 0) || !std::isfinite(variance))
    throw InvalidArgument("gaussian variance must be positive and finite");
  return NoiseSpec(NoiseKind::kGaussian, variance, 0);
}

NoiseSpec NoiseSpec::double_geometric(double rate) {
  if (!(rate > 0) || !std::isfinite(rate))
    throw InvalidArgument("double geometric rate must be positive and finite");
  return NoiseSpec(NoiseKind::kDoubleGeometric, rate, 0);
}

NoiseSpec NoiseSpec::truncated_double_geometric(double rate,
                                                std::int64_t bound) {
  if (!(rate > 0) || !std::isfinite(rate))
    throw InvalidArgument("truncated double geometric rate must be positive");
  if (bound < 1)
    throw InvalidArgument("truncated double geometric bound must be >= 1");
  return NoiseSpec(NoiseKind::kTruncatedDoubleGeometric, rate, bound);
}

NoiseSpec NoiseSpec::discrete_gaussian(double sigma2) {
  if (!(sigma2 > 0) || !std::isfinite(sigma2))
    throw InvalidArgument("discrete gaussian sigma^2 must be positive");
  return NoiseSpec(NoiseKind::kDiscreteGaussian, sigma2, 0);
}

NoiseSpec NoiseSpec::zero() { return NoiseSpec(NoiseKind::kZero, 0.0, 0); }

double NoiseSpec::stddev() const { return std::sqrt(variance_); }

bool NoiseSpec::is_discrete() const {
  return kind_ != NoiseKind::kLaplace && kind_ != NoiseKind::kGaussian;
}

double NoiseSpec::pmf(std::int64_t k) const {
  switch (kind_) {
    case NoiseKind::kLaplace:
    case NoiseKind::kGaussian:
      return 0.0;
    case NoiseKind::kDoubleGeometric: {
      const double q = std::exp(-param_);
      return (1.0 - q) / (1.0 + q) * std::exp(-param_ * std::abs(double(k)));
    }
    case NoiseKind::kTruncatedDoubleGeometric: {
      const double q = std::exp(-param_);
      const std::int64_t a = k < 0 ? -k : k;
      if (a > bound_) return 0.0;
      if (a == bound_) return std::exp(-param_ * double(bound_)) / (1.0 + q);
      return (1.0 - q) / (1.0 + q) * std::exp(-param_ * double(a));
    }
    case NoiseKind::kDiscreteGaussian:
      return dgauss_weight(k, param_) / dgauss_normalizer(param_);
    case NoiseKind::kZero:
      return k == 0 ? 1.0 : 0.0;
  }
  return 0.0;
}

double NoiseSpec::continuous_sf(double t) const {
  if (kind_ == NoiseKind::kLaplace) {
    return t >= 0 ? 0.5 * std::exp(-t / param_)
                  : 1.0 - 0.5 * std::exp(t / param_);
  }
  return 0.5 * std::erfc(t / std::sqrt(2.0 * param_));
}

double NoiseSpec::discrete_cdf(std::int64_t k) const {
  switch (kind_) {
    case NoiseKind::kTruncatedDoubleGeometric:
      if (k >= bound_) return 1.0;
      if (k < -bound_) return 0.0;
      [[fallthrough]];
    case NoiseKind::kDoubleGeometric: {
      const double q = std::exp(-param_);
      if (k >= 0) return 1.0 - std::exp(-param_ * double(k + 1)) / (1.0 + q);
      return std::exp(-param_ * double(-k)) / (1.0 + q);
    }
    case NoiseKind::kDiscreteGaussian: {
      const std::int64_t w = dgauss_window(param_);
      if (k < -w) return 0.0;
      if (k >= w) return 1.0;
      // Sum the smaller side for accuracy.
      if (k < 0) {
        double s = 0.0;
        for (std::int64_t j = -w; j <= k; ++j) s += dgauss_weight(j, param_);
        return s / dgauss_normalizer(param_);
      }
      return 1.0 - discrete_sf(k);
    }
    case NoiseKind::kZero:
      return k >= 0 ? 1.0 : 0.0;
    default:
      return 0.0;
  }
}

double NoiseSpec::discrete_sf(std::int64_t k) const {
  switch (kind_) {
    case NoiseKind::kTruncatedDoubleGeometric:
      if (k >= bound_) return 0.0;
      if (k < -bound_) return 1.0;
      [[fallthrough]];
    case NoiseKind::kDoubleGeometric: {
      const double q = std::exp(-param_);
      if (k + 1 >= 0) return std::exp(-param_ * double(k + 1)) / (1.0 + q);
      return 1.0 - std::exp(-param_ * double(-k)) / (1.0 + q);
    }
    case NoiseKind::kDiscreteGaussian: {
      const std::int64_t w = dgauss_window(param_);
      if (k >= w) return 0.0;
      if (k < -w) return 1.0;
      if (k >= 0) {
        double s = 0.0;
        for (std::int64_t j = w; j > k; --j) s += dgauss_weight(j, param_);
        return s / dgauss_normalizer(param_);
      }
      return 1.0 - discrete_cdf(k);
    }
    case NoiseKind::kZero:
      return k >= 0 ? 0.0 : 1.0;
    default:
      return 0.0;
  }
}

double NoiseSpec::cdf(double t) const {
  if (std::isnan(t)) throw InvalidArgument("cdf of NaN");
  if (t == kInf) return 1.0;
  if (t == -kInf) return 0.0;
  if (!is_discrete()) return 1.0 - continuous_sf(t);
  return discrete_cdf(static_cast<std::int64_t>(std::floor(t)));
}

double NoiseSpec::cdf_below(double t) const {
  if (std::isnan(t)) throw InvalidArgument("cdf of NaN");
  if (t == kInf) return 1.0;
  if (t == -kInf) return 0.0;
  if (!is_discrete()) return 1.0 - continuous_sf(t);
  return discrete_cdf(static_cast<std::int64_t>(std::ceil(t)) - 1);
}

double NoiseSpec::log_cdf_below(double t) const {
  if (std::isnan(t)) throw InvalidArgument("cdf of NaN");
  if (t == kInf) return 0.0;
  if (t == -kInf) return -kInf;
  double sf;
  if (!is_discrete()) {
    sf = continuous_sf(t);
  } else {
    sf = discrete_sf(static_cast<std::int64_t>(std::ceil(t)) - 1);
  }
  if (sf < 0.5) return std::log1p(-sf);
  return std::log(cdf_below(t));
}

double NoiseSpec::quantile(double u, double tail) const {
  if (!(u >= 0.0 && u <= 1.0)) throw InvalidArgument("quantile level outside [0,1]");
  if (u <= 0.0) {
    if (kind_ == NoiseKind::kZero) return 0.0;
    if (kind_ == NoiseKind::kTruncatedDoubleGeometric) return double(-bound_);
    return -kInf;
  }
  if (tail <= 0.0) {
    if (kind_ == NoiseKind::kZero) return 0.0;
    if (kind_ == NoiseKind::kTruncatedDoubleGeometric) return double(bound_);
    return kInf;
  }
  switch (kind_) {
    case NoiseKind::kLaplace:
      return u >= 0.5 ? -param_ * std::log(2.0 * tail)
                      : param_ * std::log(2.0 * u);
    case NoiseKind::kGaussian: {
      const double s = std::sqrt(param_);
      return s * (tail < 0.5 ? normal_upper_quantile(tail) : normal_quantile(u));
    }
    case NoiseKind::kZero:
      return 0.0;
    default:
      break;
  }

  // Discrete kinds: integer search from a continuous guess.
  double guess;
  if (kind_ == NoiseKind::kDiscreteGaussian) {
    const double s = std::sqrt(param_);
    guess = s * (tail < 0.5 ? normal_upper_quantile(tail) : normal_quantile(u));
  } else {
    const double b = 1.0 / param_;
    guess = u >= 0.5 ? -b * std::log(2.0 * tail) : b * std::log(2.0 * u);
    if (kind_ == NoiseKind::kTruncatedDoubleGeometric)
      guess = std::clamp(guess, double(-bound_), double(bound_));
  }
  auto reaches = [&](std::int64_t k) {
    return u > 0.5 ? discrete_sf(k) <= tail : discrete_cdf(k) >= u;
  };
  std::int64_t k = static_cast<std::int64_t>(std::floor(guess));
  while (!reaches(k)) ++k;
  while (reaches(k - 1)) --k;
  return static_cast<double>(k);
}

double NoiseSpec::sample(Rng& rng) const {
  switch (kind_) {
    case NoiseKind::kLaplace: {
      const double u1 = rng.uniform();
      const double u2 = rng.uniform();
      return param_ * std::log(u1 / u2);
    }
    case NoiseKind::kGaussian: {
      const double u1 = rng.uniform();
      const double u2 = rng.uniform();
      return std::sqrt(param_) * std::sqrt(-2.0 * std::log(u1)) *
             std::cos(2.0 * std::numbers::pi * u2);
    }
    case NoiseKind::kDoubleGeometric:
      return sample_double_geometric(rng, param_);
    case NoiseKind::kTruncatedDoubleGeometric:
      return std::clamp(sample_double_geometric(rng, param_), double(-bound_),
                        double(bound_));
    case NoiseKind::kDiscreteGaussian: {
      // Rejection from a discrete Laplace proposal with scale floor(sigma)+1.
      const double sigma = std::sqrt(param_);
      const double t = std::floor(sigma) + 1.0;
      for (;;) {
        const double y = sample_double_geometric(rng, 1.0 / t);
        const double d = std::abs(y) - param_ / t;
        if (rng.uniform() < std::exp(-d * d / (2.0 * param_))) return y;
      }
    }
    case NoiseKind::kZero:
      return 0.0;
  }
  return 0.0;
}

std::string NoiseSpec::describe() const {
  switch (kind_) {
    case NoiseKind::kLaplace:
      return "laplace(b=" + format_double(param_) + ")";
    case NoiseKind::kGaussian:
      return "gauss(var=" + format_double(param_) + ")";
    case NoiseKind::kDoubleGeometric:
      return "dgeo(rate=" + format_double(param_) + ")";
    case NoiseKind::kTruncatedDoubleGeometric:
      return "tdgeo(rate=" + format_double(param_) +
             " B=" + std::to_string(bound_) + ")";
    case NoiseKind::kDiscreteGaussian:
      return "dgauss(sigma2=" + format_double(param_) + ")";
    case NoiseKind::kZero:
      return "zero";
  }
  return "?";
}

// Acklam's rational approximation refined with one Halley step against erfc.
double normal_quantile(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  if (p > 0.5) return normal_upper_quantile(1.0 - p);

  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) *
        q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  for (int it = 0; it < 2; ++it) {
    const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
    x = x - u / (1.0 + x * u / 2.0);
  }
  return x;
}

double normal_upper_quantile(double tail) {
  if (tail <= 0.0) return kInf;
  if (tail >= 1.0) return -kInf;
  return -normal_quantile(tail);
}

}  // namespace dpfit
