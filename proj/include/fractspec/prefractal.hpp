#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fractspec/ifs_model.hpp"

namespace fractspec {

inline constexpr std::size_t kDefaultSegmentCap = 10'000'000;
inline constexpr std::size_t kDefaultCompositionCap = 2'000'000;

/// Planar vertex chain; depth is the refinement level k (0 for the unit chord).
struct Polyline {
  Eigen::Matrix2Xd vertices;
  int depth = 0;

  std::size_t segment_count() const {
    return vertices.cols() > 0 ? static_cast<std::size_t>(vertices.cols() - 1) : 0;
  }
  double segment_length(std::size_t i) const {
    const auto c = static_cast<Eigen::Index>(i);
    return (vertices.col(c + 1) - vertices.col(c)).norm();
  }
  Eigen::VectorXd segment_lengths() const;
};

/// p_k = union of S_i(p_{k-1}); p_1 is the normalized generatrix.
/// Throws ValidationError for k < 1 or when N^k exceeds the segment cap.
Polyline iterate(const Realization& ifs, int k, std::size_t segment_cap = kDefaultSegmentCap);
Polyline iterate(const Generatrix& generatrix, int k, std::size_t segment_cap = kDefaultSegmentCap);

/// One composition r = (r_1..r_N), sum r_i = k: multinomial(k; r) segments of
/// length prod a_i^{r_i}.
struct CompositionEntry {
  std::vector<int> composition;
  std::uint64_t count = 0;
  double length = 0.0;
};

struct LengthGroup {
  double length = 0.0;
  std::uint64_t count = 0;
};

struct CompositionCensus {
  int depth = 0;
  std::vector<CompositionEntry> entries;

  std::uint64_t total() const;
  /// Compositions merged by equal length (relative tolerance), ascending.
  std::vector<LengthGroup> by_length(double rel_tol = 1e-12) const;
};

/// Analytic segment census of p_k; no geometry is built.
CompositionCensus census(const SelfSimilarSystem& system, int k,
                         std::size_t composition_cap = kDefaultCompositionCap);

/// k! / (r_1! ... r_N!); throws NumericalError on uint64 overflow.
std::uint64_t multinomial(const std::vector<int>& composition);

/// Groups (length, count) pairs whose lengths agree within rel_tol, ascending.
std::vector<LengthGroup> group_by_length(std::vector<LengthGroup> items, double rel_tol = 1e-12);
std::vector<LengthGroup> segment_length_groups(const Polyline& polyline, double rel_tol = 1e-12);

/// Per-step expansor choice. Steps are 0-based contractor indices; step k
/// (1-based) expands by 1/a_{step(k)}.
class ExpansionSchedule {
 public:
  /// Finite list of steps; asking for more than steps.size() is an error.
  static ExpansionSchedule explicit_steps(std::vector<std::size_t> steps);
  static ExpansionSchedule constant(std::size_t index);
  /// Step k uses `small_index` iff floor(lambda k) > floor(lambda (k-1)),
  /// otherwise `large_index`; so r_k = floor(lambda k) steps use small_index.
  static ExpansionSchedule mix(std::size_t small_index, std::size_t large_index, double lambda);

  std::size_t step(int k) const;
  std::vector<std::size_t> steps(int k) const;
  /// Number of steps available, or -1 when unbounded.
  long long available() const { return mix_ ? -1 : static_cast<long long>(steps_.size()); }
  /// r_k for a mix schedule: number of the first k steps that use small_index.
  int small_count(int k) const;

  bool is_mix() const { return mix_; }
  double lambda() const { return lambda_; }
  std::size_t small_index() const { return small_; }
  std::size_t large_index() const { return large_; }

  /// Throws ValidationError when an index is >= n.
  void validate(std::size_t n) const;

 private:
  std::vector<std::size_t> steps_;
  bool mix_ = false;
  double lambda_ = 0.0;
  std::size_t small_ = 0;
  std::size_t large_ = 0;
};

/// E_k = prod_{j<=k} 1/a_{s_j}, evaluated from contractors only.
double cumulative_expansion(const SelfSimilarSystem& system, const ExpansionSchedule& schedule,
                            int k);

/// p'_k = G_k(p_k) with G_k = G_{k-1} o S_{s_k}^{-1}, G_0 = identity.
///
/// G_k has ratio E_k, and G_k o S_{s_k} = G_{k-1}, so the copy S_{s_k}(p_{k-1})
/// inside p_k lands exactly on p'_{k-1}. Vertex j of p'_{k-1} is vertex
/// anchor_index + j of p'_k.
struct ExpandedPolyline {
  Polyline polyline;
  double cumulative_expansion = 1.0;
  std::size_t anchor_index = 0;
  Eigen::Affine2d placement = Eigen::Affine2d::Identity();
};

/// p'_1 ... p'_k in order.
std::vector<ExpandedPolyline> expand_sequence(const Realization& ifs,
                                              const ExpansionSchedule& schedule, int k,
                                              std::size_t segment_cap = kDefaultSegmentCap);
ExpandedPolyline expand(const Realization& ifs, const ExpansionSchedule& schedule, int k,
                        std::size_t segment_cap = kDefaultSegmentCap);
ExpandedPolyline expand(const Generatrix& generatrix, const ExpansionSchedule& schedule, int k,
                        std::size_t segment_cap = kDefaultSegmentCap);

/// Max over vertices of `inner` of the distance to the nearest vertex of `outer`.
double inheritance_residual(const Polyline& inner, const Polyline& outer);

/// Largest pairwise vertex distance, via convex hull and rotating calipers.
double diameter(const Polyline& polyline);
double diameter(const Eigen::Matrix2Xd& points);

/// Counter-clockwise hull without collinear points.
Eigen::Matrix2Xd convex_hull(const Eigen::Matrix2Xd& points);

std::size_t unit_segment_count(const ExpandedPolyline& expanded, double tol = 1e-9);
std::size_t unit_segment_count(const Polyline& polyline, double tol = 1e-9);

}  // namespace fractspec
