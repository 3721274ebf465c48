#include "fractspec/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fractspec/errors.hpp"
#include "fractspec/numeric.hpp"

namespace fractspec {

double hausdorff_dim(const SelfSimilarSystem& system) {
  const Eigen::ArrayXd log_a = system.contractors().array().log();
  // s(d) = sum a_i^d - 1 decreases strictly from N - 1 > 0 at d = 0
  auto residual = [&](double d) { return (d * log_a).exp().sum() - 1.0; };
  double hi = 64.0;
  while (residual(hi) >= 0.0) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NumericalError("hausdorff_dim: no bracket for the root");
  }
  return bisect_decreasing(residual, 0.0, hi, 200);
}

double mf_dim_max(const SelfSimilarSystem& system) { return hausdorff_dim(system); }

double mf_dim_min(const SelfSimilarSystem& system) {
  return 1.0 + std::log(system.length()) / std::log(1.0 / system.a_min());
}

double divider_dim(const SelfSimilarSystem& system) { return mf_dim_min(system); }

std::vector<std::string> dimension_warnings(const SelfSimilarSystem& system) {
  std::vector<std::string> out;
  if (system.length() <= 1.0) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "generatrix length L = " << system.length()
        << " <= 1: the set is not a fractal curve and d_min <= 1";
    out.push_back(msg.str());
  }
  return out;
}

std::vector<DiscreteSpectrumEntry> discrete_mf_spectrum(const SelfSimilarSystem& system) {
  const double d_min = mf_dim_min(system);
  const double d_max = mf_dim_max(system);
  std::vector<DiscreteSpectrumEntry> entries;
  for (std::size_t idx : system.ascending_order()) {
    const double a = system.contractors()(static_cast<Eigen::Index>(idx));
    if (!entries.empty() && std::abs(a - entries.back().contractor) <= 1e-12 * a) {
      entries.back().indices.push_back(idx);
      continue;
    }
    DiscreteSpectrumEntry e;
    e.contractor = a;
    e.indices = {idx};
    e.lower = d_min;
    e.upper = d_max;
    entries.push_back(std::move(e));
  }

  for (auto& e : entries) std::sort(e.indices.begin(), e.indices.end());
  if (entries.size() == 1) {
    // all contractors equal: both formulas coincide
    entries.front().kind = DiscreteSpectrumEntry::Kind::Exact;
    entries.front().value = d_max;
    return entries;
  }
  entries.front().kind = DiscreteSpectrumEntry::Kind::Exact;
  entries.front().value = d_min;
  entries.back().kind = DiscreteSpectrumEntry::Kind::Exact;
  entries.back().value = d_max;
  return entries;
}

double mix_exponent(double b, double a, double c) {
  if (!(b > 0.0 && a < 1.0 && b < a)) {
    std::ostringstream msg;
    msg << "mix_exponent: need 0 < b < a < 1, got b = " << b << ", a = " << a;
    throw ValidationError(msg.str());
  }
  if (!(c >= b && c <= a)) {
    std::ostringstream msg;
    msg << "mix_exponent: target c = " << c << " outside [" << b << ", " << a << "]";
    throw ValidationError(msg.str());
  }
  return std::clamp(std::log(c / a) / std::log(b / a), 0.0, 1.0);
}

ExpansionSchedule schedule_for(const SelfSimilarSystem& system, double c) {
  const double lo = system.a_min();
  const double hi = system.a_max();
  if (!(c >= lo && c <= hi)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "schedule_for: target contractor " << c << " outside [a_min, a_max] = [" << lo << ", "
        << hi << "]";
    throw ValidationError(msg.str());
  }
  if (c == lo || lo == hi) return ExpansionSchedule::constant(system.argmin());
  if (c == hi) return ExpansionSchedule::constant(system.argmax());
  return ExpansionSchedule::mix(system.argmin(), system.argmax(), mix_exponent(lo, hi, c));
}

}  // namespace fractspec
