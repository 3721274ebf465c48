#pragma once

// Thermodynamic description of a self-similar measure (a_i, p_i).
//
// Notation used throughout: a frequency vector lambda assigns a proportion to
// each map; the Lagrange multiplier is `multiplier` (q in the partition
// function) and `omega` is -tau(q), so that
//
//   sum_j a_j^omega p_j^multiplier = 1,   f = omega + multiplier * alpha.
//
// Everything that samples or solves is templated on the scalar so curves can
// be traced in extended precision when their differences matter.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "fractspec/dimension.hpp"
#include "fractspec/errors.hpp"
#include "fractspec/ifs_model.hpp"
#include "fractspec/numeric.hpp"

namespace fractspec {

template <typename Scalar>
VectorX<Scalar> log_contractors(const SelfSimilarSystem& system) {
  return system.contractors().template cast<Scalar>().array().log().matrix();
}

template <typename Scalar>
VectorX<Scalar> log_weights(const SelfSimilarSystem& system) {
  return system.weights().template cast<Scalar>().array().log().matrix();
}

/// Throws ValidationError unless lambda_i >= 0 and sum lambda_i = 1 (1e-12).
template <typename Derived>
void check_frequency(const Eigen::MatrixBase<Derived>& lambda, std::size_t n) {
  using std::abs;
  if (static_cast<std::size_t>(lambda.size()) != n) {
    throw ValidationError("frequency vector has " + std::to_string(lambda.size()) +
                          " entries, system has " + std::to_string(n));
  }
  if ((lambda.array() < 0).any()) throw ValidationError("frequency vector has a negative entry");
  if (abs(static_cast<double>(lambda.sum()) - 1.0) > 1e-12) {
    throw ValidationError("frequency vector does not sum to 1");
  }
}

/// Local Hoelder exponent of the level set with frequencies lambda:
/// sum lambda_i log p_i / sum lambda_i log a_i.
template <typename Derived>
typename Derived::Scalar alpha_of(const Eigen::MatrixBase<Derived>& lambda,
                                  const SelfSimilarSystem& system) {
  using Scalar = typename Derived::Scalar;
  check_frequency(lambda, system.size());
  return lambda.dot(log_weights<Scalar>(system)) / lambda.dot(log_contractors<Scalar>(system));
}

/// Dimension of the level set with frequencies lambda:
/// sum lambda_i log lambda_i / sum lambda_i log a_i, with 0 log 0 = 0.
template <typename Derived>
typename Derived::Scalar f_of(const Eigen::MatrixBase<Derived>& lambda,
                              const SelfSimilarSystem& system) {
  using Scalar = typename Derived::Scalar;
  check_frequency(lambda, system.size());
  const Scalar entropy = lambda.unaryExpr([](Scalar x) { return xlogx(x); }).sum();
  return entropy / lambda.dot(log_contractors<Scalar>(system));
}

struct AlphaBounds {
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  std::vector<std::size_t> argmin;  // every index attaining alpha_min (1e-12 relative)
  std::vector<std::size_t> argmax;
};

/// min / max over i of log p_i / log a_i.
AlphaBounds alpha_bounds(const SelfSimilarSystem& system);

/// True when every log p_i / log a_i coincides (1e-12 relative): the measure
/// has a single local dimension and its spectrum is one point.
bool is_monofractal(const SelfSimilarSystem& system);

/// True when a_min and a_max differ by more than 1e-12 relative.
bool has_distinct_contractors(const SelfSimilarSystem& system);

/// Omega solving sum_j a_j^omega p_j^multiplier = 1 (log space bisection).
template <typename Scalar = double>
Scalar solve_omega(Scalar multiplier, const SelfSimilarSystem& system) {
  using std::abs;
  using std::log;
  const VectorX<Scalar> log_a = log_contractors<Scalar>(system);
  const VectorX<Scalar> log_p = log_weights<Scalar>(system);
  const VectorX<Scalar> offset = multiplier * log_p;
  auto residual = [&](Scalar omega) {
    return log_sum_exp((omega * log_a + offset).eval());
  };
  // every term <= 1 at lo, every term <= 1/N at hi
  const Scalar log_n = log(static_cast<Scalar>(system.size()));
  const VectorX<Scalar> w = -offset.cwiseQuotient(log_a);
  Scalar lo = w.maxCoeff();
  Scalar hi = (w.array() - log_n / log_a.array()).maxCoeff();
  if (residual(hi) == Scalar(0)) return hi;
  std::tie(lo, hi) = expand_bracket_decreasing(residual, lo, hi + Scalar(1e-9) * (Scalar(1) + abs(hi)));
  return bisect_decreasing(residual, lo, hi);
}

/// One point of the (alpha, f(alpha)) curve with its Legendre coordinates.
template <typename Scalar>
struct SpectrumPoint {
  Scalar multiplier = 0;  // Lambda = q = f'(alpha)
  Scalar omega = 0;       // Omega = -tau(q) = f - Lambda alpha
  Scalar alpha = 0;
  Scalar f = 0;
};

template <typename Scalar>
struct CriticalPoint {
  VectorX<Scalar> frequencies;  // lambda bar
  SpectrumPoint<Scalar> point;
};

/// Maximizer of f over the level set alpha(lambda) = alpha_0 selected by the
/// multiplier: lambda bar_i = a_i^omega p_i^multiplier.
template <typename Scalar = double>
CriticalPoint<Scalar> critical_point(Scalar multiplier, const SelfSimilarSystem& system) {
  const VectorX<Scalar> log_a = log_contractors<Scalar>(system);
  const VectorX<Scalar> log_p = log_weights<Scalar>(system);
  const Scalar omega = solve_omega<Scalar>(multiplier, system);
  CriticalPoint<Scalar> out;
  out.frequencies = (omega * log_a + multiplier * log_p).array().exp().matrix();
  const Scalar alpha = out.frequencies.dot(log_p) / out.frequencies.dot(log_a);
  out.point = {multiplier, omega, alpha, omega + multiplier * alpha};
  return out;
}

/// Equal-weight parameterization by omega: lambda_i = a_i^omega / sum_j a_j^omega.
/// Always uses p_i = 1/N; the system's own weights are ignored.
template <typename Scalar = double>
CriticalPoint<Scalar> equal_weight_point(Scalar omega, const SelfSimilarSystem& system) {
  using std::log;
  const VectorX<Scalar> log_a = log_contractors<Scalar>(system);
  const VectorX<Scalar> scaled = omega * log_a;
  const Scalar log_partition = log_sum_exp(scaled);
  const Scalar log_n = log(static_cast<Scalar>(system.size()));
  CriticalPoint<Scalar> out;
  out.frequencies = (scaled.array() - log_partition).exp().matrix();
  const Scalar mean_log_a = out.frequencies.dot(log_a);
  const Scalar alpha = -log_n / mean_log_a;
  const Scalar f = omega - log_partition / mean_log_a;
  out.point = {log_partition / log_n, omega, alpha, f};
  return out;
}

/// f(alpha(omega)) on the equal-weight curve.
template <typename Scalar = double>
Scalar equal_weight_f(Scalar omega, const SelfSimilarSystem& system) {
  return equal_weight_point<Scalar>(omega, system).point.f;
}

/// Limits of f at the two ends of the equal-weight curve:
/// log(1/m)/log a_min and log(1/m')/log a_max, with m, m' the multiplicities
/// of the smallest and largest contractor.
struct EqualWeightAsymptotes {
  double f_at_alpha_min = 0.0;
  double f_at_alpha_max = 0.0;
  std::size_t m_min = 0;
  std::size_t m_max = 0;
};
EqualWeightAsymptotes equal_weight_asymptotes(const SelfSimilarSystem& system);

/// Analytic end of a spectrum (multiplier -> +inf for alpha_min, -inf for alpha_max).
struct SpectrumEndpoint {
  double alpha = 0.0;
  double f = 0.0;
  Eigen::VectorXd frequencies;
};

/// Both ends for arbitrary weights. The limiting frequencies live on the maps
/// attaining the extreme ratio log p_i / log a_i, and f there is the
/// similarity dimension of that sub-system (0 for a single map).
std::pair<SpectrumEndpoint, SpectrumEndpoint> spectrum_endpoints(const SelfSimilarSystem& system);

struct OmegaMin {
  double omega = 0.0;
  double f = 0.0;
  double d_min = 0.0;
  double lower_asymptote = 0.0;  // log(1/m) / log a_min
  bool used_scan = false;
};

/// Omega on the left branch (-inf, D_0] of the equal-weight curve where
/// f(alpha(omega)) = d_min. Throws ValidationError when all contractors are equal.
OmegaMin omega_min(const SelfSimilarSystem& system);

/// D~ = f(alpha(1)) = 1 + log L / sum (a_i/L) log(1/a_i), equal weights.
/// Throws NumericalError if d_min <= D~ fails.
double d_tilde(const SelfSimilarSystem& system);

/// D_1 for the system's weights: sum p log p / sum p log a.
double information_dim(const SelfSimilarSystem& system);

/// Renyi dimension D_q from sum p_i^q a_i^{-tau} = 1, D_q = tau / (q - 1).
/// q = 1 uses the information-dimension limit; q = +/-inf (or |q| > 1e4)
/// give alpha_min / alpha_max.
double renyi(const SelfSimilarSystem& system, double q);

/// Dimensions of the measure p_i = a_i / L against the Mendes France extremes.
struct CaseAReport {
  Eigen::VectorXd weights;
  double alpha_min_closed_form = 0.0;  // 1 + log L / log(1/a_min)
  double alpha_min = 0.0;              // from alpha_bounds
  double d_plus_inf = 0.0;
  double d_zero = 0.0;
  double d_min = 0.0;
  double d_max = 0.0;
  double hausdorff = 0.0;
  bool min_identity = false;  // d_min = D_{+inf}
  bool max_identity = false;  // d_max = D_0
};
CaseAReport case_a_identification(const SelfSimilarSystem& system, double tol = 1e-10);

// ---------------------------------------------------------------- spectrum

struct SpectrumOptions {
  enum class Parameter { Multiplier, Omega };

  Parameter parameter = Parameter::Multiplier;
  double lo = -20.0;
  double hi = 20.0;
  int points = 512;
  /// 0 gives a uniform grid; larger values pack points toward both ends.
  double tanh_stretch = 1.0;
  /// Insert the apex, D_1, D~ and Omega_min positions as extra samples.
  bool include_marks = true;
};

/// lo + (hi - lo) (1 + tanh(s t) / tanh(s)) / 2 on uniform t in [-1, 1].
std::vector<double> tanh_grid(double lo, double hi, int points, double stretch);

struct SpectrumAnnotations {
  double d_zero = 0.0;  // D_0 = dim_H
  double d_one = 0.0;   // D_1 for the curve's weights
  double d_min = 0.0;
  double d_max = 0.0;
  double alpha_min = 0.0;
  double alpha_max = 0.0;
  double f_at_alpha_min = 0.0;
  double f_at_alpha_max = 0.0;
  std::optional<double> d_tilde;    // equal weights only
  std::optional<double> omega_min;  // equal weights, two distinct contractors
};

template <typename Scalar>
struct SpectrumCurve {
  /// Sampled points sorted by alpha; frequencies.col(j) belongs to points[j].
  std::vector<SpectrumPoint<Scalar>> points;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> frequencies;
  SpectrumEndpoint left;   // alpha_min end
  SpectrumEndpoint right;  // alpha_max end
  SpectrumAnnotations annotations;
  Eigen::VectorXd contractors;
  Eigen::VectorXd weights;
  bool monofractal = false;
};

SpectrumAnnotations spectrum_annotations(const SelfSimilarSystem& system);

/// Samples the spectrum along a multiplier grid (any weights) or an omega grid
/// (equal weights; the system's weights must be uniform).
template <typename Scalar = double>
SpectrumCurve<Scalar> spectrum(const SelfSimilarSystem& system, const SpectrumOptions& options = {}) {
  const bool omega_param = options.parameter == SpectrumOptions::Parameter::Omega;
  if (omega_param && !system.uniform_weights()) {
    throw ValidationError("spectrum: the omega parameterization needs equal weights");
  }
  if (options.points < 2 || !(options.hi > options.lo)) {
    throw ValidationError("spectrum: need at least 2 grid points on a non-empty range");
  }

  SpectrumCurve<Scalar> curve;
  curve.contractors = system.contractors();
  curve.weights = system.weights();
  curve.annotations = spectrum_annotations(system);
  std::tie(curve.left, curve.right) = spectrum_endpoints(system);
  const std::size_t n = system.size();

  if (is_monofractal(system)) {
    // a single local dimension: the whole curve is the apex
    curve.monofractal = true;
    const auto apex = critical_point<Scalar>(Scalar(0), system);
    curve.points.push_back(apex.point);
    curve.frequencies = apex.frequencies;
    return curve;
  }

  std::vector<double> grid = tanh_grid(options.lo, options.hi, options.points, options.tanh_stretch);
  if (options.include_marks) {
    const auto& ann = curve.annotations;
    if (omega_param) {
      grid.push_back(ann.d_zero);
      grid.push_back(0.0);
      if (ann.d_tilde) grid.push_back(1.0);
      if (ann.omega_min) grid.push_back(*ann.omega_min);
    } else {
      grid.push_back(0.0);
      grid.push_back(1.0);
      if (system.uniform_weights()) {
        grid.push_back(equal_weight_point<double>(1.0, system).point.multiplier);
        if (ann.omega_min) grid.push_back(equal_weight_point<double>(*ann.omega_min, system).point.multiplier);
      }
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double l, double r) { return std::abs(l - r) <= 1e-12 * (1.0 + std::abs(l)); }),
             grid.end());

  std::vector<CriticalPoint<Scalar>> samples;
  samples.reserve(grid.size());
  for (double t : grid) {
    samples.push_back(omega_param ? equal_weight_point<Scalar>(Scalar(t), system)
                                  : critical_point<Scalar>(Scalar(t), system));
  }
  std::stable_sort(samples.begin(), samples.end(), [](const auto& l, const auto& r) {
    return l.point.alpha < r.point.alpha;
  });

  curve.frequencies.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(samples.size()));
  curve.points.reserve(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    curve.points.push_back(samples[j].point);
    curve.frequencies.col(static_cast<Eigen::Index>(j)) = samples[j].frequencies;
  }
  return curve;
}

/// Both axes divided by D_0 (slopes kept), and the inversion (alpha, f) ->
/// (1/alpha, f/alpha) of that shrunk curve. On the inverted curve the slope is
/// omega / D_0 and the intercept is the original multiplier.
template <typename Scalar>
std::pair<SpectrumCurve<Scalar>, SpectrumCurve<Scalar>> shrink_and_invert(const SpectrumCurve<Scalar>& curve,
                                                                          double d_zero) {
  if (!(d_zero > 0.0)) throw ValidationError("shrink_and_invert: D_0 must be positive");
  const Scalar scale = Scalar(1) / Scalar(d_zero);

  SpectrumCurve<Scalar> shrunk = curve;
  SpectrumCurve<Scalar> inverted = curve;
  for (std::size_t j = 0; j < curve.points.size(); ++j) {
    const auto& p = curve.points[j];
    if (!(p.alpha > Scalar(0))) throw ValidationError("shrink_and_invert: alpha must be positive");
    shrunk.points[j] = {p.multiplier, p.omega * scale, p.alpha * scale, p.f * scale};
    const auto& s = shrunk.points[j];
    inverted.points[j] = {s.omega, s.multiplier, Scalar(1) / s.alpha, s.f / s.alpha};
  }
  auto shrink_end = [&](SpectrumEndpoint e) {
    e.alpha /= d_zero;
    e.f /= d_zero;
    return e;
  };
  auto invert_end = [](SpectrumEndpoint e) {
    e.f /= e.alpha;
    e.alpha = 1.0 / e.alpha;
    return e;
  };
  shrunk.left = shrink_end(curve.left);
  shrunk.right = shrink_end(curve.right);
  // inversion reverses the alpha order
  inverted.left = invert_end(shrunk.right);
  inverted.right = invert_end(shrunk.left);
  std::reverse(inverted.points.begin(), inverted.points.end());
  inverted.frequencies = curve.frequencies.rowwise().reverse();
  return {shrunk, inverted};
}

// ------------------------------------------------------------ verification

/// Finite-difference weights for the first derivative at x0 over nodes x
/// (Fornberg's recursion, arbitrary spacing).
template <typename Scalar>
std::vector<Scalar> derivative_weights(Scalar x0, const std::vector<Scalar>& x) {
  const std::size_t n = x.size();
  std::vector<std::vector<Scalar>> c(n, std::vector<Scalar>(2, Scalar(0)));
  Scalar c1 = 1;
  Scalar c4 = x[0] - x0;
  c[0][0] = 1;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, 1);
    Scalar c2 = 1;
    const Scalar c5 = c4;
    c4 = x[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const Scalar c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) {
          c[i][k] = c1 * (Scalar(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - Scalar(k) * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<Scalar> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

struct LegendreReport {
  std::size_t interior_points = 0;
  double max_slope_error = 0.0;      // |df/dalpha - multiplier|
  double max_identity_error = 0.0;   // |f - (omega + multiplier alpha)|
  double max_tau_slope_error = 0.0;  // |dtau/dmultiplier - alpha|
  double worst_slope_multiplier = 0.0;
  bool passed = false;
};

struct LegendreTolerances {
  double slope = 1e-4;
  double identity = 1e-10;
  double tau_slope = 1e-4;
  int stencil = 5;
};

/// Checks, along a sampled curve, that the multiplier is the slope of f(alpha),
/// that f = omega + multiplier alpha, and that d tau / d multiplier = alpha.
/// Derivatives use a `stencil`-point finite difference in the multiplier.
template <typename Scalar>
LegendreReport legendre_consistency(const SpectrumCurve<Scalar>& curve, const LegendreTolerances& tol = {}) {
  using std::abs;
  const std::size_t m = curve.points.size();
  if (m < 18) {
    throw ValidationError("legendre_consistency: grid too coarse (" + std::to_string(m > 2 ? m - 2 : 0) +
                          " interior points, need 16)");
  }
  // order by multiplier so the stencil nodes are monotone
  std::vector<SpectrumPoint<Scalar>> pts = curve.points;
  std::sort(pts.begin(), pts.end(), [](const auto& l, const auto& r) { return l.multiplier < r.multiplier; });

  LegendreReport report;
  const std::size_t width = static_cast<std::size_t>(std::max(3, tol.stencil));
  for (std::size_t j = 0; j < m; ++j) {
    const auto& p = pts[j];
    report.max_identity_error =
        std::max(report.max_identity_error, static_cast<double>(abs(p.f - (p.omega + p.multiplier * p.alpha))));
    if (j == 0 || j + 1 == m) continue;

    std::size_t first = j >= width / 2 ? j - width / 2 : 0;
    first = std::min(first, m - width);
    std::vector<Scalar> nodes(width);
    for (std::size_t i = 0; i < width; ++i) nodes[i] = pts[first + i].multiplier;
    const auto w = derivative_weights(p.multiplier, nodes);
    Scalar df = 0, dalpha = 0, domega = 0;
    for (std::size_t i = 0; i < width; ++i) {
      const auto& q = pts[first + i];
      // differences against the centre keep the sums free of the constant part
      df += w[i] * (q.f - p.f);
      dalpha += w[i] * (q.alpha - p.alpha);
      domega += w[i] * (q.omega - p.omega);
    }
    const double slope_err = static_cast<double>(abs(df / dalpha - p.multiplier));
    if (slope_err > report.max_slope_error) {
      report.max_slope_error = slope_err;
      report.worst_slope_multiplier = static_cast<double>(p.multiplier);
    }
    report.max_tau_slope_error = std::max(report.max_tau_slope_error, static_cast<double>(abs(-domega - p.alpha)));
    ++report.interior_points;
  }
  report.passed = report.max_slope_error <= tol.slope && report.max_identity_error <= tol.identity &&
                  report.max_tau_slope_error <= tol.tau_slope;
  return report;
}

/// Bordered Hessian of f(lambda) - multiplier alpha(lambda) at the critical
/// frequencies. Off-diagonal second derivatives vanish there, so the matrix is
/// [[0, -A^T], [-A, diag(B)]] with A = grad alpha and B_i = (1/lambda_i) / sum lambda_j log a_j.
struct HessianReport {
  bool applicable = false;
  std::string reason;
  /// Variables sorted by |A_i| descending; a_terms, b_terms and the matrix use this order.
  std::vector<std::size_t> order;
  Eigen::VectorXd a_terms;
  Eigen::VectorXd b_terms;
  Eigen::MatrixXd bordered;
  /// Leading principal minors |H_2| .. |H_{N+1}| (index 0 is |H_2|).
  std::vector<double> minors;
  /// Same minors from |H_{n+1}| = B_n |H_n| - A_n^2 prod_{i<n} B_i.
  std::vector<double> recurrence;
  /// Same recursion with the sign written (-1)^(n-1) instead of -1.
  std::vector<double> printed_recurrence;
  double max_recurrence_rel_error = 0.0;
  double max_printed_recurrence_rel_error = 0.0;
  bool verdict = false;  // |H_3| > 0 and signs alternate: a strict local maximum
};

HessianReport hessian_check(double multiplier, const SelfSimilarSystem& system);

struct MaximalityReport {
  bool applicable = false;
  int trials = 0;
  double max_increase = 0.0;  // max of f(lambda + delta) - f(lambda)
  double max_constraint_drift = 0.0;
};

/// Random perturbations tangent to {sum lambda = 1, alpha(lambda) = alpha_0}
/// (both constraints are linear in lambda), of norm up to `radius`.
MaximalityReport constrained_perturbation_check(double multiplier, const SelfSimilarSystem& system,
                                                std::uint64_t seed, int trials = 200, double radius = 1e-3);

}  // namespace fractspec
