#include "dpfit/solvers/order_stats.hpp"

#include <cmath>

#include "dpfit/error.hpp"

namespace dpfit {

double max_exceed_prob(const NoiseSpec& spec, int j, double t) {
  if (j <= 0) throw InvalidArgument("max_exceed_prob needs j >= 1");
  const double log_below = spec.log_cdf_below(t);
  return -std::expm1(static_cast<double>(j) * log_below);
}

double max_order_quantile(const NoiseSpec& spec, int j, double p) {
  if (j <= 0) throw InvalidArgument("max_order_quantile needs j >= 1");
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("quantile level must be in (0, 1)");
  const double log_u = std::log(p) / static_cast<double>(j);
  return spec.quantile(std::exp(log_u), -std::expm1(log_u));
}

}  // namespace dpfit
