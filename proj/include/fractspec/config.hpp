#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fractspec/ifs_model.hpp"
#include "fractspec/prefractal.hpp"

namespace fractspec {

struct QRange {
  double lo = -10.0;
  double hi = 10.0;
  double step = 0.5;
};

struct SolverSettings {
  int depth = 3;
  std::optional<int> k_first;
  std::size_t segment_cap = kDefaultSegmentCap;
  std::size_t composition_cap = kDefaultCompositionCap;
  std::optional<std::uint64_t> cell_cap;
  double epsilon = 0.45;
  std::optional<double> cell_size;
  int grid = 512;
  std::optional<std::pair<double, double>> lambda_range;
  std::optional<std::pair<double, double>> omega_range;
  QRange q_range;
  double tanh_stretch = 1.0;
  std::uint64_t seed = 1;
};

struct ExpansionSettings {
  std::optional<std::vector<std::size_t>> schedule;  // 1-based as written
  std::optional<double> target_c;
};

struct OutputSettings {
  std::optional<std::string> dir;
  bool svg = false;
  bool shrink = false;
  bool invert = false;
};

struct JobConfig {
  std::string name;
  /// Always set after parsing.
  std::optional<SelfSimilarSystem> system;
  /// Set when the geometry came from a generatrix.
  std::optional<Realization> realization;
  SolverSettings solver;
  ExpansionSettings expansion;
  OutputSettings output;
};

/// Parses the JSON job description. Unknown keys, wrong types and values out
/// of range throw ValidationError naming the offending path.
JobConfig parse_config(const std::string& text);
JobConfig load_config(const std::string& path);

/// Range and consistency checks on the settings (run again after CLI overrides).
void validate_settings(const JobConfig& config);

/// Schedule from the expansion settings: an explicit list (converted to
/// 0-based) or the two-extreme mix for target_c. Throws if neither is set.
ExpansionSchedule resolve_schedule(const JobConfig& config);

}  // namespace fractspec
