#include "fractspec/prefractal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fractspec/errors.hpp"

namespace fractspec {

namespace {

// N^k, or cap + 1 once it passes the cap.
std::size_t capped_power(std::size_t base, int exponent, std::size_t cap) {
  std::size_t value = 1;
  for (int i = 0; i < exponent; ++i) {
    if (value > cap / base) return cap + 1;
    value *= base;
  }
  return value;
}

void check_depth(const char* op, int k, std::size_t n, std::size_t segment_cap) {
  if (k < 1) throw ValidationError(std::string(op) + ": depth k must be >= 1, got " + std::to_string(k));
  if (capped_power(n, k, segment_cap) > segment_cap) {
    throw ValidationError(std::string(op) + ": " + std::to_string(n) + "^" + std::to_string(k) +
                          " segments exceeds the cap of " + std::to_string(segment_cap));
  }
}

// Applies every map to `prev` and chains the copies end to end.
Eigen::Matrix2Xd refine(const Eigen::Matrix2Xd& prev, const std::vector<Eigen::Affine2d>& maps) {
  const Eigen::Index per_copy = prev.cols() - 1;
  const auto n = static_cast<Eigen::Index>(maps.size());
  Eigen::Matrix2Xd next(2, n * per_copy + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& m = maps[static_cast<std::size_t>(i)];
    next.middleCols(i * per_copy, per_copy + 1) =
        (m.linear() * prev).colwise() + m.translation();
  }
  return next;
}

std::vector<Eigen::Affine2d> affine_maps(const Realization& ifs) {
  std::vector<Eigen::Affine2d> maps;
  maps.reserve(ifs.maps.size());
  for (const auto& s : ifs.maps) maps.push_back(s.transform());
  return maps;
}

Eigen::Matrix2Xd unit_chord() {
  Eigen::Matrix2Xd chord(2, 2);
  chord << 0.0, 1.0, 0.0, 0.0;
  return chord;
}

}  // namespace

Eigen::VectorXd Polyline::segment_lengths() const {
  if (vertices.cols() < 2) return {};
  const Eigen::Index n = vertices.cols() - 1;
  return (vertices.rightCols(n) - vertices.leftCols(n)).colwise().norm().transpose();
}

Polyline iterate(const Realization& ifs, int k, std::size_t segment_cap) {
  check_depth("iterate", k, ifs.system.size(), segment_cap);
  const auto maps = affine_maps(ifs);
  Polyline p{ifs.generatrix.vertices, 1};
  for (int level = 2; level <= k; ++level) {
    p.vertices = refine(p.vertices, maps);
    p.depth = level;
  }
  return p;
}

Polyline iterate(const Generatrix& generatrix, int k, std::size_t segment_cap) {
  return iterate(system_from_generatrix(generatrix), k, segment_cap);
}

std::uint64_t CompositionCensus::total() const {
  std::uint64_t sum = 0;
  for (const auto& e : entries) sum += e.count;
  return sum;
}

std::vector<LengthGroup> CompositionCensus::by_length(double rel_tol) const {
  std::vector<LengthGroup> items;
  items.reserve(entries.size());
  for (const auto& e : entries) items.push_back({e.length, e.count});
  return group_by_length(std::move(items), rel_tol);
}

std::uint64_t multinomial(const std::vector<int>& composition) {
  // product of binomials C(r_1 + ... + r_j, r_j), each built incrementally
  unsigned __int128 value = 1;
  std::uint64_t running = 0;
  for (int r : composition) {
    if (r < 0) throw ValidationError("multinomial: negative part " + std::to_string(r));
    for (int t = 1; t <= r; ++t) {
      ++running;
      value = value * running / static_cast<unsigned>(t);
      if (value > std::numeric_limits<std::uint64_t>::max()) {
        throw NumericalError("multinomial: count overflows 64 bits");
      }
    }
  }
  return static_cast<std::uint64_t>(value);
}

CompositionCensus census(const SelfSimilarSystem& system, int k, std::size_t composition_cap) {
  if (k < 1) throw ValidationError("census: depth k must be >= 1, got " + std::to_string(k));
  const std::size_t n = system.size();

  // C(k + N - 1, N - 1) compositions
  unsigned __int128 count = 1;
  for (std::size_t j = 1; j < n; ++j) {
    count = count * static_cast<unsigned>(k + static_cast<int>(j)) / j;
    if (count > composition_cap) {
      throw ValidationError("census: number of compositions exceeds the cap of " +
                            std::to_string(composition_cap));
    }
  }

  const Eigen::VectorXd& a = system.contractors();
  CompositionCensus out;
  out.depth = k;
  out.entries.reserve(static_cast<std::size_t>(count));

  std::vector<int> r(n, 0);
  // enumerate compositions in lexicographic order (first part decreasing)
  auto emit = [&]() {
    // product of powers keeps dyadic lengths exact
    double len = 1.0;
    for (std::size_t i = 0; i < n; ++i) len *= std::pow(a(static_cast<Eigen::Index>(i)), r[i]);
    out.entries.push_back({r, multinomial(r), len});
  };
  auto recurse = [&](auto&& self, std::size_t index, int remaining) -> void {
    if (index + 1 == n) {
      r[index] = remaining;
      emit();
      return;
    }
    for (int part = remaining; part >= 0; --part) {
      r[index] = part;
      self(self, index + 1, remaining - part);
    }
  };
  recurse(recurse, 0, k);
  return out;
}

std::vector<LengthGroup> group_by_length(std::vector<LengthGroup> items, double rel_tol) {
  std::sort(items.begin(), items.end(),
            [](const LengthGroup& l, const LengthGroup& r) { return l.length < r.length; });
  std::vector<LengthGroup> groups;
  for (const auto& item : items) {
    if (!groups.empty() &&
        std::abs(item.length - groups.back().length) <= rel_tol * groups.back().length) {
      groups.back().count += item.count;
    } else {
      groups.push_back(item);
    }
  }
  return groups;
}

std::vector<LengthGroup> segment_length_groups(const Polyline& polyline, double rel_tol) {
  const Eigen::VectorXd lengths = polyline.segment_lengths();
  std::vector<LengthGroup> items;
  items.reserve(static_cast<std::size_t>(lengths.size()));
  for (Eigen::Index i = 0; i < lengths.size(); ++i) items.push_back({lengths(i), 1});
  return group_by_length(std::move(items), rel_tol);
}

ExpansionSchedule ExpansionSchedule::explicit_steps(std::vector<std::size_t> steps) {
  ExpansionSchedule s;
  s.steps_ = std::move(steps);
  return s;
}

ExpansionSchedule ExpansionSchedule::constant(std::size_t index) {
  return mix(index, index, 1.0);
}

ExpansionSchedule ExpansionSchedule::mix(std::size_t small_index, std::size_t large_index,
                                         double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw ValidationError("schedule: mix exponent must lie in [0, 1]");
  }
  ExpansionSchedule s;
  s.mix_ = true;
  s.lambda_ = lambda;
  s.small_ = small_index;
  s.large_ = large_index;
  return s;
}

int ExpansionSchedule::small_count(int k) const {
  if (!mix_) {
    int c = 0;
    for (int j = 1; j <= k; ++j) c += step(j) == small_ ? 1 : 0;
    return c;
  }
  // floor(lambda k); the nudge keeps exact products such as (1/2) * 2 from
  // rounding down when lambda itself came out of a logarithm ratio
  const double r = std::floor(lambda_ * k + 1e-9);
  return std::clamp(static_cast<int>(r), 0, k);
}

std::size_t ExpansionSchedule::step(int k) const {
  if (k < 1) throw ValidationError("schedule: steps are numbered from 1");
  if (!mix_) {
    if (static_cast<std::size_t>(k) > steps_.size()) {
      throw ValidationError("schedule: step " + std::to_string(k) + " requested but only " +
                            std::to_string(steps_.size()) + " steps given");
    }
    return steps_[static_cast<std::size_t>(k - 1)];
  }
  return small_count(k) > small_count(k - 1) ? small_ : large_;
}

std::vector<std::size_t> ExpansionSchedule::steps(int k) const {
  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(std::max(k, 0)));
  for (int j = 1; j <= k; ++j) out.push_back(step(j));
  return out;
}

void ExpansionSchedule::validate(std::size_t n) const {
  auto check = [n](std::size_t index) {
    if (index >= n) {
      throw ValidationError("schedule: contractor index " + std::to_string(index + 1) +
                            " is out of range 1.." + std::to_string(n));
    }
  };
  if (mix_) {
    check(small_);
    check(large_);
  } else {
    for (auto s : steps_) check(s);
  }
}

double cumulative_expansion(const SelfSimilarSystem& system, const ExpansionSchedule& schedule,
                            int k) {
  schedule.validate(system.size());
  double e = 1.0;
  for (int j = 1; j <= k; ++j) e /= system.contractors()(static_cast<Eigen::Index>(schedule.step(j)));
  return e;
}

std::vector<ExpandedPolyline> expand_sequence(const Realization& ifs,
                                              const ExpansionSchedule& schedule, int k,
                                              std::size_t segment_cap) {
  check_depth("expand", k, ifs.system.size(), segment_cap);
  schedule.validate(ifs.system.size());
  if (schedule.available() >= 0 && schedule.available() < k) {
    throw ValidationError("expand: schedule has " + std::to_string(schedule.available()) +
                          " steps, depth " + std::to_string(k) + " needs " + std::to_string(k));
  }

  const auto maps = affine_maps(ifs);
  std::vector<ExpandedPolyline> out;
  out.reserve(static_cast<std::size_t>(k));

  Eigen::Matrix2Xd p = unit_chord();
  Eigen::Affine2d placement = Eigen::Affine2d::Identity();
  double expansion = 1.0;
  for (int level = 1; level <= k; ++level) {
    const std::size_t s = schedule.step(level);
    const std::size_t copy_len = static_cast<std::size_t>(p.cols() - 1);
    p = refine(p, maps);
    placement = placement * maps[s].inverse();
    expansion /= ifs.system.contractors()(static_cast<Eigen::Index>(s));

    ExpandedPolyline e;
    e.polyline.vertices = (placement.linear() * p).colwise() + placement.translation();
    e.polyline.depth = level;
    e.cumulative_expansion = expansion;
    e.anchor_index = s * copy_len;
    e.placement = placement;
    out.push_back(std::move(e));
  }
  return out;
}

ExpandedPolyline expand(const Realization& ifs, const ExpansionSchedule& schedule, int k,
                        std::size_t segment_cap) {
  auto seq = expand_sequence(ifs, schedule, k, segment_cap);
  return std::move(seq.back());
}

ExpandedPolyline expand(const Generatrix& generatrix, const ExpansionSchedule& schedule, int k,
                        std::size_t segment_cap) {
  return expand(system_from_generatrix(generatrix), schedule, k, segment_cap);
}

double inheritance_residual(const Polyline& inner, const Polyline& outer) {
  const Eigen::Index m = outer.vertices.cols();
  if (m == 0) return std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index l, Eigen::Index r) {
    return outer.vertices(0, l) < outer.vertices(0, r);
  });

  double worst = 0.0;
  for (Eigen::Index q = 0; q < inner.vertices.cols(); ++q) {
    const Point2 x = inner.vertices.col(q);
    auto it = std::lower_bound(order.begin(), order.end(), x.x(), [&](Eigen::Index idx, double v) {
      return outer.vertices(0, idx) < v;
    });
    double best = std::numeric_limits<double>::infinity();
    for (auto right = it; right != order.end(); ++right) {
      if (outer.vertices(0, *right) - x.x() > best) break;
      best = std::min(best, (outer.vertices.col(*right) - x).norm());
    }
    for (auto left = it; left != order.begin();) {
      --left;
      if (x.x() - outer.vertices(0, *left) > best) break;
      best = std::min(best, (outer.vertices.col(*left) - x).norm());
    }
    worst = std::max(worst, best);
  }
  return worst;
}

Eigen::Matrix2Xd convex_hull(const Eigen::Matrix2Xd& points) {
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(points.cols()));
  for (Eigen::Index i = 0; i < points.cols(); ++i) pts.emplace_back(points.col(i));
  std::sort(pts.begin(), pts.end(), [](const Point2& l, const Point2& r) {
    return l.x() < r.x() || (l.x() == r.x() && l.y() < r.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) {
    Eigen::Matrix2Xd out(2, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = pts[i];
    return out;
  }

  // Andrew's monotone chain
  std::vector<Point2> hull(2 * pts.size());
  std::size_t h = 0;
  for (const auto& p : pts) {
    while (h >= 2 && cross2(hull[h - 1] - hull[h - 2], p - hull[h - 2]) <= 0.0) --h;
    hull[h++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = h + 1; i-- > 0;) {
    const auto& p = pts[i];
    while (h >= lower && cross2(hull[h - 1] - hull[h - 2], p - hull[h - 2]) <= 0.0) --h;
    hull[h++] = p;
  }
  hull.resize(h - 1);

  Eigen::Matrix2Xd out(2, static_cast<Eigen::Index>(hull.size()));
  for (std::size_t i = 0; i < hull.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = hull[i];
  return out;
}

double diameter(const Eigen::Matrix2Xd& points) {
  const Eigen::Matrix2Xd hull = convex_hull(points);
  const Eigen::Index h = hull.cols();
  if (h < 2) return 0.0;
  if (h == 2) return (hull.col(1) - hull.col(0)).norm();

  // rotating calipers over antipodal pairs
  double best = 0.0;
  Eigen::Index j = 1;
  for (Eigen::Index i = 0; i < h; ++i) {
    const Point2 a = hull.col(i);
    const Point2 b = hull.col((i + 1) % h);
    const Point2 edge = b - a;
    while (std::abs(cross2(edge, hull.col((j + 1) % h) - a)) >
           std::abs(cross2(edge, hull.col(j) - a))) {
      j = (j + 1) % h;
    }
    best = std::max({best, (hull.col(j) - a).norm(), (hull.col(j) - b).norm()});
  }
  return best;
}

double diameter(const Polyline& polyline) { return diameter(polyline.vertices); }

std::size_t unit_segment_count(const Polyline& polyline, double tol) {
  const Eigen::VectorXd lengths = polyline.segment_lengths();
  return static_cast<std::size_t>(((lengths.array() - 1.0).abs() <= tol).count());
}

std::size_t unit_segment_count(const ExpandedPolyline& expanded, double tol) {
  return unit_segment_count(expanded.polyline, tol);
}

}  // namespace fractspec
