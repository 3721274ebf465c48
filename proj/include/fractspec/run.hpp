#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "fractspec/config.hpp"

namespace fractspec {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Values given on the command line; each one replaces the config entry.
struct CliOverrides {
  std::optional<std::string> out_dir;
  std::optional<int> depth;
  std::optional<std::string> schedule;  // "i,j,..." 1-based
  std::optional<double> target_c;
  std::optional<double> epsilon;
  std::optional<int> grid;
  std::optional<std::string> lambda_range;  // "LO:HI"
  std::optional<std::string> omega_range;
  std::optional<std::string> q_range;  // "LO:HI:STEP"
  bool svg = false;
  bool shrink = false;
  bool invert = false;
};

/// "LO:HI" (parts == 2) or "LO:HI:STEP" (parts == 3).
std::vector<double> parse_colon_list(const std::string& text, std::size_t parts, const std::string& flag);
/// "i,j,..." into positive integers.
std::vector<std::size_t> parse_schedule(const std::string& text);

/// Folds overrides into the config and re-validates. Throws ValidationError.
void apply_overrides(JobConfig& config, const CliOverrides& overrides);

const std::vector<std::string>& subcommands();

/// Runs one subcommand. Artifacts go to files under config.output.dir when it
/// is set; otherwise the main table goes to `out`, followed by "# key = value"
/// summary lines. Returns 0, 2 (invalid input) or 3 (numerical failure);
/// error messages go to `err`.
int run(const std::string& subcommand, const JobConfig& config, std::ostream& out, std::ostream& err);

/// Loads the config, applies overrides and runs, mapping errors to exit codes.
int run_with_config_file(const std::string& subcommand, const std::string& config_path, const CliOverrides& overrides,
                         std::ostream& out, std::ostream& err);

}  // namespace fractspec
