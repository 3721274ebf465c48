#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fractspec/ifs_model.hpp"
#include "fractspec/prefractal.hpp"

namespace fractspec {

/// Root d of sum a_i^d = 1 (similarity dimension).
double hausdorff_dim(const SelfSimilarSystem& system);

/// Largest Mendes France dimension of the discrete spectrum: the curve
/// expanded by the smallest expansor 1/a_max. Equals hausdorff_dim.
double mf_dim_max(const SelfSimilarSystem& system);

/// Smallest Mendes France dimension: 1 + log L / log(1/a_min).
double mf_dim_min(const SelfSimilarSystem& system);

/// Divider (compass) dimension 1 + lim log L_eps / log(1/eps). For the
/// prefractal sequence sampled at eps_k = a_min^k this is mf_dim_min.
double divider_dim(const SelfSimilarSystem& system);

/// Warnings about inputs the dimension formulas accept but were not made for.
std::vector<std::string> dimension_warnings(const SelfSimilarSystem& system);

struct DiscreteSpectrumEntry {
  enum class Kind { Exact, Bracketed };

  double contractor = 0.0;
  std::vector<std::size_t> indices;  // 0-based, original order
  Kind kind = Kind::Bracketed;
  std::optional<double> value;  // set for Exact
  double lower = 0.0;
  double upper = 0.0;
  std::optional<double> empirical;  // filled by annotate_with_estimates
};

/// One entry per distinct contractor, ascending. The smallest maps to
/// mf_dim_min, the largest to mf_dim_max; intermediate contractors have no
/// closed form and are reported as the bracket [d_min, d_max].
std::vector<DiscreteSpectrumEntry> discrete_mf_spectrum(const SelfSimilarSystem& system);

/// lambda = log(c/a) / log(b/a), so that b^lambda a^(1-lambda) = c.
/// Requires 0 < b <= c <= a < 1 and b < a.
double mix_exponent(double b, double a, double c);

/// Two-expansor schedule realizing the target contractor c in
/// [a_min, a_max]: only the extreme contractors are used.
ExpansionSchedule schedule_for(const SelfSimilarSystem& system, double c);

}  // namespace fractspec
