#pragma once

#include "dpfit/noise.hpp"

namespace dpfit {

// P(max of j i.i.d. draws ≥ t) = 1 − P(X < t)^j.
double max_exceed_prob(const NoiseSpec& spec, int j, double t);

// The p-quantile of the max of j i.i.d. draws: F⁻¹(p^{1/j}).
double max_order_quantile(const NoiseSpec& spec, int j, double p);

}  // namespace dpfit
