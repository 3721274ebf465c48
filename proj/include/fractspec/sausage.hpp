#pragma once

// Area of the epsilon-neighbourhood of a polyline on a square raster, and the
// log-log regression of that area against the diameter of expanded curves.

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <vector>

#include "fractspec/dimension.hpp"
#include "fractspec/ifs_model.hpp"
#include "fractspec/prefractal.hpp"

namespace fractspec {

inline constexpr std::uint64_t kDefaultCellCap = 400'000'000ULL;

/// FRACTSPEC_CELL_CAP when set (a positive integer), kDefaultCellCap otherwise.
std::uint64_t cell_cap_from_env();

struct SausageOptions {
  /// Raster pitch; 0 means epsilon / 4, the coarsest allowed.
  double cell_size = 0.0;
  /// 0 means cell_cap_from_env().
  std::uint64_t cell_cap = 0;
  std::size_t segment_cap = kDefaultSegmentCap;
};

struct SausageArea {
  double area = 0.0;
  double cell_size = 0.0;
  std::uint64_t covered_cells = 0;
  std::uint64_t grid_cells = 0;  // cells of the inflated bounding box
  bool coarsened = false;
};

/// Counts cells of an axis-aligned grid over the bounding box inflated by eps
/// whose centres lie within eps of some segment. Rows are scanned as unions
/// of the exact x-intervals each segment's stadium cuts out of the row's
/// centre line. If the grid exceeds the cap the pitch is coarsened, up to
/// eps / 4; beyond that the call throws NumericalError.
SausageArea sausage_area(const Polyline& polyline, double epsilon, const SausageOptions& options = {});

struct SausageSample {
  int depth = 0;
  double epsilon = 0.0;
  double delta = 0.0;  // diameter
  double area = 0.0;
};

struct DimEstimate {
  double slope = 0.0;
  double stderr_slope = 0.0;
  double intercept = 0.0;
  std::vector<SausageSample> samples;
};

/// Least-squares slope of log area against log delta. Needs at least three
/// samples with distinct diameters.
DimEstimate fit_log_log(std::vector<SausageSample> samples);

/// Builds p'_k for k_first..k_last, measures each, and fits the slope.
/// Throws NumericalError if the slope leaves the band [0.5, 2.5].
DimEstimate estimate_mf_dim(const Realization& ifs, const ExpansionSchedule& schedule, int k_first, int k_last,
                            double epsilon, const SausageOptions& options = {});

/// Fills `empirical` on bracketed entries using a constant schedule of that
/// contractor. Entries whose estimate fails keep an empty value.
void annotate_with_estimates(std::vector<DiscreteSpectrumEntry>& entries, const Realization& ifs, int k_first,
                             int k_last, double epsilon, const SausageOptions& options = {});

/// CSV with header k,epsilon,delta,area,log_delta,log_area.
void write_samples_csv(std::ostream& out, const std::vector<SausageSample>& samples);

}  // namespace fractspec
