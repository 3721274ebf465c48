#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <utility>

#include "fractspec/errors.hpp"

namespace fractspec {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// x log x with the entropy convention 0 log 0 = 0.
template <typename Scalar>
Scalar xlogx(Scalar x) {
  using std::log;
  return x > Scalar(0) ? x * log(x) : Scalar(0);
}

/// log(sum_i exp(x_i)) without overflow.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  using std::exp;
  using std::log;
  const Scalar top = x.maxCoeff();
  if (!std::isfinite(static_cast<double>(top))) return top;
  return top + log((x.array() - top).exp().sum());
}

/// Softmax of x, computed in log space.
template <typename Derived>
VectorX<typename Derived::Scalar> softmax(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Scalar lse = log_sum_exp(x);
  return (x.array() - lse).exp().matrix();
}

/// Bisection for a strictly decreasing function with f(lo) > 0 > f(hi).
/// Runs until the bracket collapses to adjacent representable values, f hits
/// zero exactly, or max_iter is reached.
template <typename Scalar, typename F>
Scalar bisect_decreasing(F&& f, Scalar lo, Scalar hi, int max_iter = 4000) {
  for (int it = 0; it < max_iter; ++it) {
    const Scalar mid = lo + (hi - lo) / Scalar(2);
    if (!(mid > lo && mid < hi)) break;
    const Scalar value = f(mid);
    if (value == Scalar(0)) return mid;
    if (value > Scalar(0)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // pick the endpoint with the smaller residual
  using std::abs;
  return abs(f(lo)) <= abs(f(hi)) ? lo : hi;
}

/// Widens [lo, hi] geometrically until a decreasing f changes sign across it.
template <typename Scalar, typename F>
std::pair<Scalar, Scalar> expand_bracket_decreasing(F&& f, Scalar lo, Scalar hi,
                                                    int max_doublings = 200) {
  Scalar width = hi - lo;
  for (int i = 0; i < max_doublings && !(f(lo) > Scalar(0)); ++i) {
    lo -= width;
    width *= Scalar(2);
  }
  width = hi - lo;
  for (int i = 0; i < max_doublings && !(f(hi) < Scalar(0)); ++i) {
    hi += width;
    width *= Scalar(2);
  }
  if (!(f(lo) > Scalar(0)) || !(f(hi) < Scalar(0))) {
    throw NumericalError("bracket expansion failed to find a sign change");
  }
  return {lo, hi};
}

}  // namespace fractspec
