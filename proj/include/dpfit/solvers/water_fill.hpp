#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <functional>
#include <vector>

#include "dpfit/error.hpp"

namespace dpfit {

// Level γ with Σ max{a_i − γ, 0} = target, found by a sorted scan.
// Requires target > 0.
template <typename Derived>
typename Derived::Scalar water_level(const Eigen::MatrixBase<Derived>& a,
                                     typename Derived::Scalar target) {
  using Scalar = typename Derived::Scalar;
  if (!(target > 0)) throw InvalidArgument("water level needs a positive target");
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> flat = a;
  std::vector<Scalar> sorted(flat.data(), flat.data() + flat.size());
  if (sorted.empty()) throw InvalidArgument("water fill of an empty vector");
  std::sort(sorted.begin(), sorted.end(), std::greater<Scalar>());
  Scalar cum = 0;
  Scalar level = sorted[0] - target;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cum += sorted[k];
    const Scalar candidate = (cum - target) / static_cast<Scalar>(k + 1);
    if (sorted[k] - candidate > 0) level = candidate;
  }
  return level;
}

// Euclidean projection of a onto {x ≥ 0, Σx = target}: x_i = max{a_i − γ, 0}.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> simplex_water_fill(
    const Eigen::MatrixBase<Derived>& a, typename Derived::Scalar target) {
  using Scalar = typename Derived::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (target < 0) throw InvalidArgument("water fill target must be nonnegative");
  if (target == 0) return Vec::Zero(a.size());
  const Vec flat = a;
  const Scalar level = water_level(flat, target);
  return (flat.array() - level).cwiseMax(Scalar(0)).matrix();
}

}  // namespace dpfit
