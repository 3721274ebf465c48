#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fractspec/geometry.hpp"

namespace fractspec {

/// Contractor ratios a_i in (0, 1) with self-similar measure weights p_i.
///
/// Contractors are kept in the order the caller supplied them. Formulas that
/// talk about "the smallest" or "the largest" contractor go through
/// ascending_order(), which is computed once at construction.
class SelfSimilarSystem {
 public:
  const Eigen::VectorXd& contractors() const { return contractors_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  std::size_t size() const { return static_cast<std::size_t>(contractors_.size()); }

  /// True when weights came from the caller rather than the 1/N default.
  bool has_explicit_weights() const { return explicit_weights_; }
  /// True when every p_i equals 1/N.
  bool uniform_weights() const;

  double a_min() const { return contractors_(static_cast<Eigen::Index>(order_.front())); }
  double a_max() const { return contractors_(static_cast<Eigen::Index>(order_.back())); }
  std::size_t argmin() const { return order_.front(); }
  std::size_t argmax() const { return order_.back(); }
  /// L = sum of contractors, the length of the generatrix.
  double length() const { return contractors_.sum(); }

  /// Indices of contractors sorted ascending (stable for ties).
  const std::vector<std::size_t>& ascending_order() const { return order_; }
  Eigen::VectorXd sorted_contractors() const;

  /// Same contractors, weights replaced (validated).
  SelfSimilarSystem with_weights(const Eigen::VectorXd& weights) const;
  SelfSimilarSystem with_uniform_weights() const;

  friend SelfSimilarSystem build_system(const Eigen::VectorXd& contractors,
                                        const std::optional<Eigen::VectorXd>& weights);

 private:
  SelfSimilarSystem() = default;

  Eigen::VectorXd contractors_;
  Eigen::VectorXd weights_;
  std::vector<std::size_t> order_;
  bool explicit_weights_ = false;
};

/// Validates contractors (N >= 2, each in (0,1)) and weights (positive,
/// summing to 1 within 1e-12). Absent weights default to exactly 1/N.
/// Throws ValidationError.
SelfSimilarSystem build_system(const Eigen::VectorXd& contractors,
                               const std::optional<Eigen::VectorXd>& weights = std::nullopt);

SelfSimilarSystem build_system(const std::vector<double>& contractors,
                               const std::optional<std::vector<double>>& weights = std::nullopt);

/// Planar vertex chain A_1 ... A_{N+1}, one column per vertex.
struct Generatrix {
  Eigen::Matrix2Xd vertices;
  /// Empty, or one flag per segment: true maps AB onto A_iA_{i+1} with a reflection.
  std::vector<bool> flips;

  std::size_t segment_count() const {
    return vertices.cols() > 0 ? static_cast<std::size_t>(vertices.cols() - 1) : 0;
  }
  bool flipped(std::size_t i) const { return i < flips.size() && flips[i]; }
};

/// Similarity x -> translation + scale * R(rotation) * F x, with F = diag(1, -1)
/// when reflect is set.
struct Similarity2D {
  double scale = 1.0;
  double rotation = 0.0;
  bool reflect = false;
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();

  Eigen::Matrix2d linear() const;
  Eigen::Affine2d transform() const;
  Point2 operator()(const Point2& x) const { return transform() * x; }
};

/// Rescales, rotates and translates so that A_1 = (0,0) and A_{N+1} = (1,0).
/// Rejects fewer than two segments, repeated consecutive vertices, coincident
/// endpoints, mismatched flip counts and any normalized segment of length >= 1.
Generatrix normalize(const Generatrix& generatrix);

struct Realization {
  SelfSimilarSystem system;
  std::vector<Similarity2D> maps;
  Generatrix generatrix;  // normalized
  std::vector<std::string> warnings;
};

/// Contractor i is |A_i A_{i+1}|; map i sends (A_1, A_{N+1}) to (A_i, A_{i+1}).
Realization system_from_generatrix(const Generatrix& generatrix);

/// Advisory open-set-condition screen on the generatrix: flags pairs of
/// segments whose relative interiors meet. A clean result proves nothing.
std::vector<std::string> osc_warnings(const Generatrix& normalized);

/// Root a of 2a + a^p = 1 on (0, 1/2).
double tent_family_contractor(double p);

/// Straight unit segment with its middle piece of length b = a^p replaced by
/// the two other sides of an equilateral triangle: contractors (a, b, b, a).
Generatrix tent_family_generatrix(double p);

}  // namespace fractspec
