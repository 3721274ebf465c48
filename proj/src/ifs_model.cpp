#include "fractspec/ifs_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fractspec/errors.hpp"
#include "fractspec/numeric.hpp"

namespace fractspec {

namespace {

constexpr double kWeightSumTol = 1e-12;

std::string describe_index(std::size_t i) { return "[" + std::to_string(i) + "]"; }

}  // namespace

bool SelfSimilarSystem::uniform_weights() const {
  const double uniform = 1.0 / static_cast<double>(size());
  return (weights_.array() - uniform).abs().maxCoeff() <= 1e-15;
}

Eigen::VectorXd SelfSimilarSystem::sorted_contractors() const {
  Eigen::VectorXd sorted(contractors_.size());
  for (std::size_t k = 0; k < order_.size(); ++k) {
    sorted(static_cast<Eigen::Index>(k)) = contractors_(static_cast<Eigen::Index>(order_[k]));
  }
  return sorted;
}

SelfSimilarSystem SelfSimilarSystem::with_weights(const Eigen::VectorXd& weights) const {
  return build_system(contractors_, weights);
}

SelfSimilarSystem SelfSimilarSystem::with_uniform_weights() const {
  return build_system(contractors_, std::nullopt);
}

SelfSimilarSystem build_system(const Eigen::VectorXd& contractors,
                               const std::optional<Eigen::VectorXd>& weights) {
  const auto n = contractors.size();
  if (n < 2) {
    throw ValidationError("build_system: need at least 2 contractors, got " + std::to_string(n));
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = contractors(i);
    if (!(a > 0.0 && a < 1.0)) {
      std::ostringstream msg;
      msg << "build_system: contractor" << describe_index(static_cast<std::size_t>(i)) << " = "
          << a << " is outside (0, 1)";
      throw ValidationError(msg.str());
    }
  }

  SelfSimilarSystem system;
  system.contractors_ = contractors;
  if (weights) {
    if (weights->size() != n) {
      throw ValidationError("build_system: " + std::to_string(weights->size()) + " weights for " +
                            std::to_string(n) + " contractors");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!((*weights)(i) > 0.0) || !std::isfinite((*weights)(i))) {
        std::ostringstream msg;
        msg << "build_system: weight" << describe_index(static_cast<std::size_t>(i)) << " = "
            << (*weights)(i) << " must be positive";
        throw ValidationError(msg.str());
      }
    }
    const double total = weights->sum();
    if (std::abs(total - 1.0) > kWeightSumTol) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "build_system: weights sum to " << total << ", expected 1";
      throw ValidationError(msg.str());
    }
    system.weights_ = *weights;
    system.explicit_weights_ = true;
  } else {
    system.weights_ = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  }

  system.order_.resize(static_cast<std::size_t>(n));
  std::iota(system.order_.begin(), system.order_.end(), std::size_t{0});
  std::stable_sort(system.order_.begin(), system.order_.end(), [&](std::size_t l, std::size_t r) {
    return contractors(static_cast<Eigen::Index>(l)) < contractors(static_cast<Eigen::Index>(r));
  });
  return system;
}

SelfSimilarSystem build_system(const std::vector<double>& contractors,
                               const std::optional<std::vector<double>>& weights) {
  const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(
      contractors.data(), static_cast<Eigen::Index>(contractors.size()));
  if (!weights) return build_system(a, std::nullopt);
  const Eigen::VectorXd p =
      Eigen::Map<const Eigen::VectorXd>(weights->data(), static_cast<Eigen::Index>(weights->size()));
  return build_system(a, p);
}

Eigen::Matrix2d Similarity2D::linear() const {
  Eigen::Matrix2d m = scale * Eigen::Rotation2Dd(rotation).toRotationMatrix();
  if (reflect) m.col(1) = -m.col(1);
  return m;
}

Eigen::Affine2d Similarity2D::transform() const {
  Eigen::Affine2d t = Eigen::Affine2d::Identity();
  t.linear() = linear();
  t.translation() = translation;
  return t;
}

Generatrix normalize(const Generatrix& generatrix) {
  const auto& v = generatrix.vertices;
  if (v.cols() < 3) {
    throw ValidationError("generatrix: need at least 2 segments (N >= 2), got " +
                          std::to_string(std::max<Eigen::Index>(v.cols() - 1, 0)));
  }
  if (!v.allFinite()) throw ValidationError("generatrix: non-finite vertex coordinate");
  const std::size_t n = generatrix.segment_count();
  if (!generatrix.flips.empty() && generatrix.flips.size() != n) {
    throw ValidationError("generatrix: " + std::to_string(generatrix.flips.size()) +
                          " flip flags for " + std::to_string(n) + " segments");
  }
  const Point2 start = v.col(0);
  const Point2 chord = v.col(v.cols() - 1) - start;
  const double chord_len = chord.norm();
  if (!(chord_len > 0.0)) throw ValidationError("generatrix: first and last vertex coincide");

  // x -> R(-theta) (x - A_1) / |chord|
  const double theta = std::atan2(chord.y(), chord.x());
  const Eigen::Matrix2d to_unit = Eigen::Rotation2Dd(-theta).toRotationMatrix() / chord_len;

  Generatrix out;
  out.flips = generatrix.flips;
  out.vertices = to_unit * (v.colwise() - start);
  out.vertices.col(0).setZero();
  out.vertices.col(out.vertices.cols() - 1) = Point2(1.0, 0.0);

  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    const double len = (out.vertices.col(c + 1) - out.vertices.col(c)).norm();
    if (!(len > 0.0)) {
      throw ValidationError("generatrix: degenerate segment " + std::to_string(i + 1) +
                            " (repeated vertex)");
    }
    if (len >= 1.0) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "generatrix: segment " << (i + 1) << " has normalized length " << len
          << " >= 1 and is not a contraction";
      throw ValidationError(msg.str());
    }
  }
  return out;
}

Realization system_from_generatrix(const Generatrix& generatrix) {
  Generatrix g = normalize(generatrix);
  const std::size_t n = g.segment_count();

  Eigen::VectorXd contractors(static_cast<Eigen::Index>(n));
  std::vector<Similarity2D> maps;
  maps.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<Eigen::Index>(i);
    const Point2 from = g.vertices.col(c);
    const Point2 seg = g.vertices.col(c + 1) - from;
    Similarity2D s;
    s.scale = seg.norm();
    s.rotation = std::atan2(seg.y(), seg.x());
    s.reflect = g.flipped(i);
    s.translation = from;
    contractors(c) = s.scale;
    maps.push_back(s);
  }

  auto warnings = osc_warnings(g);
  return Realization{build_system(contractors), std::move(maps), std::move(g), std::move(warnings)};
}

std::vector<std::string> osc_warnings(const Generatrix& normalized) {
  std::vector<std::string> warnings;
  const auto& v = normalized.vertices;
  const auto n = v.cols() - 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    // adjacent pair: only the shared vertex may be common, so reject backtracking
    if (i + 1 < n) {
      const Point2 u = v.col(i + 1) - v.col(i);
      const Point2 w = v.col(i + 2) - v.col(i + 1);
      if (std::abs(cross2(u, w)) <= 1e-12 * u.norm() * w.norm() && u.dot(w) < 0.0) {
        warnings.push_back("segments " + std::to_string(i + 1) + " and " + std::to_string(i + 2) +
                           " fold back onto each other; open set condition is doubtful");
      }
    }
    for (Eigen::Index j = i + 2; j < n; ++j) {
      if (segments_touch(v.col(i), v.col(i + 1), v.col(j), v.col(j + 1))) {
        warnings.push_back("segments " + std::to_string(i + 1) + " and " + std::to_string(j + 1) +
                           " intersect; open set condition is doubtful");
      }
    }
  }
  return warnings;
}

double tent_family_contractor(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw ValidationError("tent family: exponent p must be positive");
  // 2a + a^p - 1 increases on (0, 1/2]
  auto g = [p](double a) { return 1.0 - 2.0 * a - std::pow(a, p); };
  return bisect_decreasing(g, 0.0, 0.5);
}

Generatrix tent_family_generatrix(double p) {
  const double a = tent_family_contractor(p);
  const double b = std::pow(a, p);
  Generatrix g;
  g.vertices.resize(2, 5);
  g.vertices << 0.0, a, a + b / 2.0, a + b, 1.0,
                0.0, 0.0, b * std::sqrt(3.0) / 2.0, 0.0, 0.0;
  return g;
}

}  // namespace fractspec
