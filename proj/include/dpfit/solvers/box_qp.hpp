#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace dpfit {

template <typename Scalar>
struct BoxQpResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x;
  bool converged = false;
  int iterations = 0;
  Scalar kkt_residual = 0;
};

// minimize ½ xᵀHx − fᵀx  subject to  lower ≤ x ≤ upper, H symmetric PSD.
//
// Nesterov-accelerated projected gradient warms up the iterate, then a
// projected Newton iteration on the free variables polishes the active set.
// Singular faces are handled with a damped solve followed by iterative
// refinement against the undamped matrix, which converges to the
// minimum-norm step whenever the reduced gradient lies in the range of the
// reduced Hessian (always true for Gram-matrix Hessians).
template <typename Scalar>
class BoxQp {
 public:
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  BoxQp(const Mat& hessian, const Vec& linear, const Vec& lower, const Vec& upper)
      : h_(hessian), f_(linear), lo_(lower), hi_(upper) {
    lipschitz_ = h_.cwiseAbs().rowwise().sum().maxCoeff();
    if (!(lipschitz_ > 0)) lipschitz_ = 1;
  }

  Vec project(const Vec& x) const { return x.cwiseMax(lo_).cwiseMin(hi_); }

  Scalar objective(const Vec& x) const {
    return Scalar(0.5) * x.dot(h_ * x) - f_.dot(x);
  }

  Vec gradient(const Vec& x) const { return h_ * x - f_; }

  // ‖x − P(x − ∇q(x))‖∞: zero exactly at a KKT point.
  Scalar kkt_residual(const Vec& x, const Vec& g) const {
    return (x - project(x - g)).cwiseAbs().maxCoeff();
  }

  BoxQpResult<Scalar> solve(const Vec& x0, Scalar tol, int max_iters,
                            int warm_iters = 50) const {
    BoxQpResult<Scalar> out;
    const Eigen::Index n = f_.size();
    Vec x = project(x0);
    if (n == 0) {
      out.x = x;
      out.converged = true;
      return out;
    }

    warm_start(x, tol, std::min(warm_iters, max_iters), out.iterations);

    const Scalar damping_base = Scalar(1e-10);
    for (int it = 0; it < max_iters; ++it) {
      const Vec g = gradient(x);
      const Scalar r = kkt_residual(x, g);
      out.kkt_residual = r;
      if (r <= tol) {
        out.converged = true;
        break;
      }
      ++out.iterations;

      const Scalar eps = std::min<Scalar>(r, Scalar(1e-3));
      std::vector<Eigen::Index> free_idx;
      std::vector<char> binding(static_cast<std::size_t>(n), 0);
      for (Eigen::Index i = 0; i < n; ++i) {
        const bool at_lo = x[i] <= lo_[i] + eps && g[i] > 0;
        const bool at_hi = x[i] >= hi_[i] - eps && g[i] < 0;
        if (at_lo || at_hi) {
          binding[static_cast<std::size_t>(i)] = 1;
        } else {
          free_idx.push_back(i);
        }
      }

      Vec d = Vec::Zero(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (binding[static_cast<std::size_t>(i)]) {
          const Scalar hii = h_(i, i) > 0 ? h_(i, i) : Scalar(1);
          d[i] = -g[i] / hii;
        }
      }
      if (!free_idx.empty()) {
        const auto m = static_cast<Eigen::Index>(free_idx.size());
        Mat hff(m, m);
        Vec gf(m);
        for (Eigen::Index a = 0; a < m; ++a) {
          gf[a] = g[free_idx[a]];
          for (Eigen::Index b = 0; b < m; ++b) hff(a, b) = h_(free_idx[a], free_idx[b]);
        }
        const Vec df = newton_direction(hff, gf, damping_base);
        for (Eigen::Index a = 0; a < m; ++a) d[free_idx[a]] = df[a];
      }

      // Projected Armijo search along d.
      constexpr Scalar sigma = Scalar(1e-4);
      Scalar alpha = 1;
      bool accepted = false;
      Vec xn;
      for (int ls = 0; ls < 40; ++ls) {
        xn = project(x + alpha * d);
        const Vec s = xn - x;
        const Scalar dq = g.dot(s) + Scalar(0.5) * s.dot(h_ * s);
        Scalar pred = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
          pred += binding[static_cast<std::size_t>(i)] ? g[i] * s[i] : alpha * g[i] * d[i];
        }
        if (dq <= sigma * pred && dq <= 0) {
          accepted = true;
          break;
        }
        alpha *= Scalar(0.5);
      }
      if (!accepted) xn = project(x - g / lipschitz_);
      x = xn;
    }
    if (!out.converged) out.kkt_residual = kkt_residual(x, gradient(x));
    out.x = std::move(x);
    return out;
  }

 private:
  void warm_start(Vec& x, Scalar tol, int iters, int& count) const {
    Vec y = x;
    Scalar t = 1;
    for (int k = 0; k < iters; ++k) {
      const Vec g = gradient(y);
      Vec xn = project(y - g / lipschitz_);
      // Adaptive restart when momentum points uphill.
      if (g.dot(xn - x) > 0) t = 1;
      const Scalar tn = (1 + std::sqrt(1 + 4 * t * t)) / 2;
      y = xn + ((t - 1) / tn) * (xn - x);
      x = std::move(xn);
      t = tn;
      ++count;
      if (k % 10 == 9 && kkt_residual(x, gradient(x)) <= tol) break;
    }
  }

  static Vec newton_direction(const Mat& hff, const Vec& gf, Scalar damping_base) {
    const Eigen::Index m = hff.rows();
    const Scalar scale = std::max<Scalar>(Scalar(1), hff.diagonal().cwiseAbs().maxCoeff());
    Scalar damping = damping_base * scale;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::LLT<Mat> llt(hff + damping * Mat::Identity(m, m));
      if (llt.info() == Eigen::Success) {
        Vec d = llt.solve(-gf);
        for (int refine = 0; refine < 4; ++refine) {
          const Vec res = -gf - hff * d;
          if (res.cwiseAbs().maxCoeff() <= std::numeric_limits<Scalar>::epsilon() * scale * 16)
            break;
          d += llt.solve(res);
        }
        if (d.allFinite()) return d;
      }
      damping *= Scalar(100);
    }
    return -gf / scale;
  }

  Mat h_;
  Vec f_;
  Vec lo_;
  Vec hi_;
  Scalar lipschitz_;
};

}  // namespace dpfit
