#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>

namespace fractspec {

using Point2 = Eigen::Vector2d;

/// Euclidean distance from p to the closed segment [a, b].
inline double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

inline double cross2(const Point2& u, const Point2& v) { return u.x() * v.y() - u.y() * v.x(); }

/// True when the closed segments [a, b] and [c, d] share at least one point.
inline bool segments_touch(const Point2& a, const Point2& b, const Point2& c, const Point2& d,
                           double tol = 1e-12) {
  const double d1 = cross2(b - a, c - a);
  const double d2 = cross2(b - a, d - a);
  const double d3 = cross2(d - c, a - c);
  const double d4 = cross2(d - c, b - c);
  if (((d1 > tol && d2 < -tol) || (d1 < -tol && d2 > tol)) &&
      ((d3 > tol && d4 < -tol) || (d3 < -tol && d4 > tol))) {
    return true;
  }
  return point_segment_distance(c, a, b) <= tol || point_segment_distance(d, a, b) <= tol ||
         point_segment_distance(a, c, d) <= tol || point_segment_distance(b, c, d) <= tol;
}

}  // namespace fractspec
