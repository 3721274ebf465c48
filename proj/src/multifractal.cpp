#include "fractspec/multifractal.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace fractspec {

namespace {

bool same_ratio(double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(std::abs(x), std::abs(y)); }

Eigen::ArrayXd ratios(const SelfSimilarSystem& system) {
  return system.weights().array().log() / system.contractors().array().log();
}

// d with sum_{i in idx} a_i^d = 1; 0 for a single map.
double sub_system_dim(const SelfSimilarSystem& system, const std::vector<std::size_t>& idx) {
  if (idx.size() < 2) return 0.0;
  Eigen::VectorXd a(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) a(static_cast<Eigen::Index>(k)) = system.contractors()(static_cast<Eigen::Index>(idx[k]));
  return hausdorff_dim(build_system(a));
}

SpectrumEndpoint endpoint_on(const SelfSimilarSystem& system, double alpha, const std::vector<std::size_t>& idx) {
  SpectrumEndpoint e;
  e.alpha = alpha;
  e.f = sub_system_dim(system, idx);
  e.frequencies = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(system.size()));
  for (std::size_t i : idx) {
    e.frequencies(static_cast<Eigen::Index>(i)) = std::pow(system.contractors()(static_cast<Eigen::Index>(i)), e.f);
  }
  return e;
}

}  // namespace

AlphaBounds alpha_bounds(const SelfSimilarSystem& system) {
  const Eigen::ArrayXd r = ratios(system);
  AlphaBounds out;
  out.alpha_min = r.minCoeff();
  out.alpha_max = r.maxCoeff();
  for (Eigen::Index i = 0; i < r.size(); ++i) {
    if (same_ratio(r(i), out.alpha_min)) out.argmin.push_back(static_cast<std::size_t>(i));
    if (same_ratio(r(i), out.alpha_max)) out.argmax.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

bool is_monofractal(const SelfSimilarSystem& system) {
  const AlphaBounds b = alpha_bounds(system);
  return same_ratio(b.alpha_min, b.alpha_max);
}

bool has_distinct_contractors(const SelfSimilarSystem& system) {
  return !same_ratio(system.a_min(), system.a_max());
}

EqualWeightAsymptotes equal_weight_asymptotes(const SelfSimilarSystem& system) {
  EqualWeightAsymptotes out;
  const Eigen::VectorXd& a = system.contractors();
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (same_ratio(a(i), system.a_min())) ++out.m_min;
    if (same_ratio(a(i), system.a_max())) ++out.m_max;
  }
  out.f_at_alpha_min = std::log(static_cast<double>(out.m_min)) / std::log(1.0 / system.a_min());
  out.f_at_alpha_max = std::log(static_cast<double>(out.m_max)) / std::log(1.0 / system.a_max());
  return out;
}

std::pair<SpectrumEndpoint, SpectrumEndpoint> spectrum_endpoints(const SelfSimilarSystem& system) {
  const AlphaBounds b = alpha_bounds(system);
  return {endpoint_on(system, b.alpha_min, b.argmin), endpoint_on(system, b.alpha_max, b.argmax)};
}

OmegaMin omega_min(const SelfSimilarSystem& system) {
  if (!has_distinct_contractors(system)) {
    throw ValidationError("omega_min: all contractors are equal, the spectrum has no Omega_min");
  }
  OmegaMin out;
  out.d_min = mf_dim_min(system);
  out.lower_asymptote = equal_weight_asymptotes(system).f_at_alpha_min;
  if (!(out.lower_asymptote < out.d_min)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "omega_min: asymptote " << out.lower_asymptote << " is not below d_min " << out.d_min;
    throw NumericalError(msg.str());
  }
  const double d_zero = hausdorff_dim(system);
  // f increases along (-inf, D_0], so d_min - f decreases there
  auto g = [&](double omega) { return out.d_min - equal_weight_f<double>(omega, system); };
  // L = 1 (a straight generatrix): d_min = D_0 and the crossing is the apex
  if (std::abs(g(d_zero)) <= 1e-12) {
    out.omega = d_zero;
    out.f = equal_weight_f<double>(d_zero, system);
    return out;
  }

  double lo = std::min(0.0, d_zero) - 1.0;
  double width = 1.0;
  for (int i = 0; i < 200 && !(g(lo) > 0.0); ++i) {
    lo -= width;
    width *= 2.0;
  }
  if (g(lo) > 0.0 && g(d_zero) <= 0.0) {
    out.omega = bisect_decreasing(g, lo, d_zero);
  } else {
    // the bracket test failed: scan for the first crossing instead
    out.used_scan = true;
    const int samples = 4096;
    double prev = lo;
    bool found = false;
    for (int i = 1; i < samples && !found; ++i) {
      const double x = lo + (d_zero - lo) * i / (samples - 1);
      if (g(prev) > 0.0 && g(x) <= 0.0) {
        out.omega = bisect_decreasing(g, prev, x);
        found = true;
      }
      prev = x;
    }
    if (!found) throw NumericalError("omega_min: f never reaches d_min on the left branch");
  }
  out.f = equal_weight_f<double>(out.omega, system);
  return out;
}

double d_tilde(const SelfSimilarSystem& system) {
  const double len = system.length();
  const Eigen::ArrayXd a = system.contractors().array();
  const double mean = ((a / len) * (1.0 / a).log()).sum();
  const double value = 1.0 + std::log(len) / mean;
  const double d_min = mf_dim_min(system);
  if (!(d_min <= value + 1e-12)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "d_tilde: d_min = " << d_min << " exceeds D~ = " << value;
    throw NumericalError(msg.str());
  }
  return value;
}

double information_dim(const SelfSimilarSystem& system) {
  const Eigen::VectorXd& p = system.weights();
  return p.dot(p.array().log().matrix()) / p.dot(system.contractors().array().log().matrix());
}

double renyi(const SelfSimilarSystem& system, double q) {
  if (std::isnan(q)) throw ValidationError("renyi: q is NaN");
  if (q > 1e4) return alpha_bounds(system).alpha_min;
  if (q < -1e4) return alpha_bounds(system).alpha_max;
  if (q == 1.0) return information_dim(system);
  const double tau = -solve_omega<double>(q, system);
  return tau / (q - 1.0);
}

CaseAReport case_a_identification(const SelfSimilarSystem& system, double tol) {
  CaseAReport r;
  r.weights = system.contractors() / system.length();
  const SelfSimilarSystem measured = system.with_weights(r.weights);
  r.alpha_min_closed_form = 1.0 + std::log(system.length()) / std::log(1.0 / system.a_min());
  r.alpha_min = alpha_bounds(measured).alpha_min;
  r.d_plus_inf = renyi(measured, std::numeric_limits<double>::infinity());
  r.d_zero = renyi(measured, 0.0);
  r.d_min = mf_dim_min(system);
  r.d_max = mf_dim_max(system);
  r.hausdorff = hausdorff_dim(system);
  r.min_identity = std::abs(r.d_min - r.d_plus_inf) <= tol;
  r.max_identity = std::abs(r.d_max - r.d_zero) <= tol;
  return r;
}

std::vector<double> tanh_grid(double lo, double hi, int points, double stretch) {
  if (points < 2) throw ValidationError("tanh_grid: need at least 2 points");
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double t = -1.0 + 2.0 * i / (points - 1);
    const double u = stretch > 0.0 ? std::tanh(stretch * t) / std::tanh(stretch) : t;
    out[static_cast<std::size_t>(i)] = lo + (hi - lo) * (1.0 + u) / 2.0;
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

SpectrumAnnotations spectrum_annotations(const SelfSimilarSystem& system) {
  SpectrumAnnotations ann;
  ann.d_zero = hausdorff_dim(system);
  ann.d_one = information_dim(system);
  ann.d_min = mf_dim_min(system);
  ann.d_max = mf_dim_max(system);
  const AlphaBounds b = alpha_bounds(system);
  ann.alpha_min = b.alpha_min;
  ann.alpha_max = b.alpha_max;
  const auto ends = spectrum_endpoints(system);
  ann.f_at_alpha_min = ends.first.f;
  ann.f_at_alpha_max = ends.second.f;
  if (system.uniform_weights()) {
    ann.d_tilde = d_tilde(system);
    if (has_distinct_contractors(system)) ann.omega_min = omega_min(system).omega;
  }
  return ann;
}

HessianReport hessian_check(double multiplier, const SelfSimilarSystem& system) {
  HessianReport r;
  const auto cp = critical_point<double>(multiplier, system);
  const Eigen::VectorXd& lam = cp.frequencies;
  const Eigen::VectorXd log_a = system.contractors().array().log().matrix();
  const Eigen::VectorXd log_p = system.weights().array().log().matrix();
  if ((lam.array() <= 0.0).any()) {
    r.reason = "a critical frequency vanishes (boundary point)";
    return r;
  }
  if (is_monofractal(system)) {
    r.reason = "monofractal measure: the constraint gradient is zero";
    return r;
  }
  const double denom = lam.dot(log_a);
  const double alpha0 = cp.point.alpha;
  const Eigen::VectorXd a_raw = (log_p - alpha0 * log_a) / denom;
  const Eigen::VectorXd b_raw = lam.cwiseInverse() / denom;
  // near a vertex the dominant coordinate has A_i ~ 0, which would zero the
  // first border; the test does not depend on the variable order
  r.order.resize(system.size());
  std::iota(r.order.begin(), r.order.end(), std::size_t{0});
  std::stable_sort(r.order.begin(), r.order.end(), [&](std::size_t i, std::size_t j) {
    return std::abs(a_raw(static_cast<Eigen::Index>(i))) > std::abs(a_raw(static_cast<Eigen::Index>(j)));
  });
  r.a_terms.resize(a_raw.size());
  r.b_terms.resize(b_raw.size());
  for (std::size_t k = 0; k < r.order.size(); ++k) {
    r.a_terms(static_cast<Eigen::Index>(k)) = a_raw(static_cast<Eigen::Index>(r.order[k]));
    r.b_terms(static_cast<Eigen::Index>(k)) = b_raw(static_cast<Eigen::Index>(r.order[k]));
  }
  if (!r.b_terms.allFinite()) {
    r.reason = "critical frequencies too small for a finite Hessian";
    return r;
  }
  const Eigen::Index n = static_cast<Eigen::Index>(system.size());
  r.bordered = Eigen::MatrixXd::Zero(n + 1, n + 1);
  r.bordered.block(0, 1, 1, n) = -r.a_terms.transpose();
  r.bordered.block(1, 0, n, 1) = -r.a_terms;
  r.bordered.block(1, 1, n, n).diagonal() = r.b_terms;

  for (Eigen::Index k = 2; k <= n + 1; ++k) r.minors.push_back(r.bordered.topLeftCorner(k, k).determinant());

  const Eigen::VectorXd& A = r.a_terms;
  const Eigen::VectorXd& B = r.b_terms;
  double correct = -A(0) * A(0);
  double printed = correct;
  double prod = B(0);  // prod_{i<n} B_i, 1-based n
  r.recurrence.push_back(correct);
  r.printed_recurrence.push_back(printed);
  for (Eigen::Index m = 2; m <= n; ++m) {
    const double an2 = A(m - 1) * A(m - 1);
    const double sign = (m - 1) % 2 == 0 ? 1.0 : -1.0;
    correct = B(m - 1) * correct - an2 * prod;
    printed = B(m - 1) * printed + sign * an2 * prod;
    prod *= B(m - 1);
    r.recurrence.push_back(correct);
    r.printed_recurrence.push_back(printed);
  }
  for (std::size_t k = 0; k < r.minors.size(); ++k) {
    const double scale = std::max(std::abs(r.minors[k]), std::numeric_limits<double>::min());
    r.max_recurrence_rel_error = std::max(r.max_recurrence_rel_error, std::abs(r.recurrence[k] - r.minors[k]) / scale);
    r.max_printed_recurrence_rel_error =
        std::max(r.max_printed_recurrence_rel_error, std::abs(r.printed_recurrence[k] - r.minors[k]) / scale);
  }
  r.applicable = true;
  // sgn |H_k| = (-1)^(k+1), k = 2 .. N+1
  bool ok = r.minors.size() >= 2 && r.minors[1] > 0.0;
  for (std::size_t j = 0; j < r.minors.size() && ok; ++j) {
    const std::size_t k = j + 2;
    ok = k % 2 == 1 ? r.minors[j] > 0.0 : r.minors[j] < 0.0;
  }
  r.verdict = ok;
  return r;
}

MaximalityReport constrained_perturbation_check(double multiplier, const SelfSimilarSystem& system,
                                                std::uint64_t seed, int trials, double radius) {
  MaximalityReport r;
  const auto cp = critical_point<double>(multiplier, system);
  const Eigen::VectorXd& lam = cp.frequencies;
  const Eigen::Index n = lam.size();
  if (n < 3 || lam.minCoeff() <= 0.0) return r;  // constraint set is a point, or on the boundary

  const Eigen::VectorXd log_a = system.contractors().array().log().matrix();
  const Eigen::VectorXd log_p = system.weights().array().log().matrix();
  const double alpha0 = cp.point.alpha;
  Eigen::MatrixXd C(2, n);
  C.row(0).setOnes();
  C.row(1) = (log_p - alpha0 * log_a).transpose();
  const Eigen::MatrixXd projector =
      Eigen::MatrixXd::Identity(n, n) - C.transpose() * (C * C.transpose()).ldlt().solve(C);

  const double f0 = f_of(lam, system);
  const double reach = std::min(radius, 0.5 * lam.minCoeff());
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  r.applicable = true;
  r.max_increase = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    Eigen::VectorXd g(n);
    for (Eigen::Index i = 0; i < n; ++i) g(i) = gauss(rng);
    Eigen::VectorXd delta = projector * g;
    const double norm = delta.norm();
    if (norm == 0.0) continue;
    delta *= reach * std::max(unit(rng), 1e-3) / norm;
    Eigen::VectorXd moved = lam + delta;
    moved /= moved.sum();
    r.max_increase = std::max(r.max_increase, f_of(moved, system) - f0);
    r.max_constraint_drift = std::max(r.max_constraint_drift, std::abs(alpha_of(moved, system) - alpha0));
    ++r.trials;
  }
  return r;
}

}  // namespace fractspec
