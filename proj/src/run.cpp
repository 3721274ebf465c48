#include "fractspec/run.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "fractspec/dimension.hpp"
#include "fractspec/errors.hpp"
#include "fractspec/multifractal.hpp"
#include "fractspec/prefractal.hpp"
#include "fractspec/report.hpp"
#include "fractspec/sausage.hpp"

namespace fractspec {

namespace {

double parse_real(const std::string& text, const std::string& flag) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (!text.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    throw ValidationError(flag + ": '" + text + "' is not a finite number");
  }
  return v;
}

// Collects artifacts: files under the output directory, or the stream.
class Sink {
 public:
  Sink(const JobConfig& config, std::ostream& out) : out_(out) {
    if (config.output.dir) {
      dir_ = std::filesystem::path(*config.output.dir);
      std::filesystem::create_directories(*dir_);
    }
  }

  bool to_files() const { return dir_.has_value(); }

  /// Primary table: file `name` or the stream.
  void table(const std::string& name, const std::function<void(std::ostream&)>& write) {
    if (dir_) {
      file(name, write);
    } else {
      write(out_);
    }
  }

  /// Secondary artifact; only possible with an output directory.
  void file(const std::string& name, const std::function<void(std::ostream&)>& write) {
    if (!dir_) throw ValidationError("writing " + name + " needs --out DIR");
    const auto path = *dir_ / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + path.string());
    write(f);
    if (!f) throw ValidationError("failed writing " + path.string());
    written_.push_back(path.string());
  }

  void summary(const KeyValues& rows) {
    if (dir_) {
      write_key_values(out_, rows);
      for (const auto& p : written_) out_ << "wrote " << p << '\n';
    } else {
      for (const auto& [k, v] : rows) out_ << "# " << k << " = " << v << '\n';
    }
  }

 private:
  std::ostream& out_;
  std::optional<std::filesystem::path> dir_;
  std::vector<std::string> written_;
};

const Realization& need_geometry(const JobConfig& config, const std::string& cmd) {
  if (!config.realization) throw ValidationError(cmd + ": needs a generatrix (or tent_family) in the config");
  return *config.realization;
}

SausageOptions sausage_options(const JobConfig& config) {
  SausageOptions o;
  if (config.solver.cell_size) o.cell_size = *config.solver.cell_size;
  if (config.solver.cell_cap) o.cell_cap = *config.solver.cell_cap;
  o.segment_cap = config.solver.segment_cap;
  return o;
}

void warnings_rows(KeyValues& rows, const std::vector<std::string>& warnings) {
  for (std::size_t i = 0; i < warnings.size(); ++i) rows.emplace_back("warning." + std::to_string(i + 1), warnings[i]);
}

int cmd_dims(const JobConfig& config, Sink& sink) {
  const SelfSimilarSystem& sys = *config.system;
  const SelfSimilarSystem uniform = sys.with_uniform_weights();
  KeyValues rows;
  rows.emplace_back("N", std::to_string(sys.size()));
  rows.emplace_back("L", format_number(sys.length()));
  rows.emplace_back("dim_H", format_number(hausdorff_dim(sys)));
  rows.emplace_back("d_min", format_number(mf_dim_min(sys)));
  rows.emplace_back("d_max", format_number(mf_dim_max(sys)));
  rows.emplace_back("divider_dim", format_number(divider_dim(sys)));
  rows.emplace_back("D_1", format_number(information_dim(sys)));
  rows.emplace_back("D_tilde", format_number(d_tilde(uniform)));
  if (has_distinct_contractors(sys)) {
    const OmegaMin om = omega_min(uniform);
    rows.emplace_back("Omega_min", format_number(om.omega));
  } else {
    rows.emplace_back("Omega_min", "none");
  }
  const AlphaBounds b = alpha_bounds(sys);
  rows.emplace_back("alpha_min", format_number(b.alpha_min));
  rows.emplace_back("alpha_max", format_number(b.alpha_max));
  const auto ends = spectrum_endpoints(sys);
  rows.emplace_back("f_at_alpha_min", format_number(ends.first.f));
  rows.emplace_back("f_at_alpha_max", format_number(ends.second.f));
  const EqualWeightAsymptotes asym = equal_weight_asymptotes(sys);
  rows.emplace_back("asymptote_f_alpha_min", format_number(asym.f_at_alpha_min));
  rows.emplace_back("asymptote_f_alpha_max", format_number(asym.f_at_alpha_max));
  for (auto& r : discrete_spectrum_rows(discrete_mf_spectrum(sys))) rows.push_back(std::move(r));
  warnings_rows(rows, dimension_warnings(sys));
  if (config.realization) warnings_rows(rows, config.realization->warnings);

  if (sink.to_files()) {
    sink.file("dims.csv", [&](std::ostream& o) { write_key_values_csv(o, rows); });
    sink.summary(rows);
  } else {
    sink.table("", [&](std::ostream& o) { write_key_values(o, rows); });
  }
  return kExitOk;
}

int cmd_spectrum(const JobConfig& config, Sink& sink) {
  const SelfSimilarSystem& sys = *config.system;
  SpectrumOptions opt;
  opt.points = config.solver.grid;
  opt.tanh_stretch = config.solver.tanh_stretch;
  if (config.solver.omega_range) {
    opt.parameter = SpectrumOptions::Parameter::Omega;
    std::tie(opt.lo, opt.hi) = *config.solver.omega_range;
  } else if (config.solver.lambda_range) {
    std::tie(opt.lo, opt.hi) = *config.solver.lambda_range;
  }
  const auto curve = spectrum<double>(sys, opt);
  sink.table("spectrum.csv", [&](std::ostream& o) { write_spectrum_csv(o, curve); });
  const KeyValues ann = annotation_rows(curve.annotations);
  if (sink.to_files()) sink.file("spectrum_annotations.txt", [&](std::ostream& o) { write_key_values(o, ann); });
  if (config.output.shrink || config.output.invert) {
    const auto [shrunk, inverted] = shrink_and_invert(curve, curve.annotations.d_zero);
    if (config.output.shrink) sink.file("spectrum_shrunk.csv", [&](std::ostream& o) { write_spectrum_csv(o, shrunk); });
    if (config.output.invert) {
      sink.file("spectrum_inverted.csv", [&](std::ostream& o) { write_spectrum_csv(o, inverted); });
    }
  }
  KeyValues rows = ann;
  rows.emplace_back("points", std::to_string(curve.points.size()));
  sink.summary(rows);
  return kExitOk;
}

int cmd_renyi(const JobConfig& config, Sink& sink) {
  const QRange& q = config.solver.q_range;
  std::vector<std::pair<double, double>> rows;
  const auto count = static_cast<long long>(std::floor((q.hi - q.lo) / q.step + 1e-9));
  for (long long j = 0; j <= count; ++j) {
    double v = q.lo + static_cast<double>(j) * q.step;
    if (std::abs(v) < 1e-12 * q.step) v = 0.0;
    if (std::abs(v - 1.0) < 1e-12 * q.step) v = 1.0;
    rows.emplace_back(v, renyi(*config.system, v));
  }
  sink.table("renyi.csv", [&](std::ostream& o) { write_renyi_csv(o, rows); });
  sink.summary({{"points", std::to_string(rows.size())}});
  return kExitOk;
}

int cmd_curve(const JobConfig& config, Sink& sink) {
  const Realization& ifs = need_geometry(config, "curve");
  const Polyline p = iterate(ifs, config.solver.depth, config.solver.segment_cap);
  sink.table("curve.csv", [&](std::ostream& o) { write_vertices_csv(o, p); });
  if (config.output.svg) sink.file("curve.svg", [&](std::ostream& o) { write_svg(o, p); });
  KeyValues rows = {{"depth", std::to_string(p.depth)},
                    {"segments", std::to_string(p.segment_count())},
                    {"diameter", format_number(diameter(p))}};
  warnings_rows(rows, ifs.warnings);
  sink.summary(rows);
  return kExitOk;
}

int cmd_expand(const JobConfig& config, Sink& sink) {
  const Realization& ifs = need_geometry(config, "expand");
  const ExpansionSchedule schedule = resolve_schedule(config);
  const int k = config.solver.depth;
  const auto seq = expand_sequence(ifs, schedule, k, config.solver.segment_cap);
  const ExpandedPolyline& e = seq.back();
  sink.table("expand.csv", [&](std::ostream& o) { write_vertices_csv(o, e.polyline); });
  if (config.output.svg) sink.file("expand.svg", [&](std::ostream& o) { write_svg(o, e.polyline); });
  double residual = 0.0;
  for (std::size_t j = 1; j < seq.size(); ++j) {
    residual = std::max(residual, inheritance_residual(seq[j - 1].polyline, seq[j].polyline) / seq[j].cumulative_expansion);
  }
  std::ostringstream steps;
  const auto used = schedule.steps(k);
  for (std::size_t j = 0; j < used.size(); ++j) steps << (j ? "," : "") << used[j] + 1;
  KeyValues rows = {{"depth", std::to_string(k)},
                    {"schedule", steps.str()},
                    {"segments", std::to_string(e.polyline.segment_count())},
                    {"cumulative_expansion", format_number(e.cumulative_expansion)},
                    {"diameter", format_number(diameter(e.polyline))},
                    {"anchor_index", std::to_string(e.anchor_index)},
                    {"unit_segments", std::to_string(unit_segment_count(e))},
                    {"inheritance_relative_residual", format_number(residual)}};
  for (const auto& g : segment_length_groups(e.polyline, 1e-9)) {
    rows.emplace_back("segments_of_length." + format_number(g.length), std::to_string(g.count));
  }
  sink.summary(rows);
  return kExitOk;
}

int cmd_census(const JobConfig& config, Sink& sink) {
  const SelfSimilarSystem& sys = *config.system;
  const CompositionCensus c = census(sys, config.solver.depth, config.solver.composition_cap);
  const auto groups = c.by_length();
  sink.table("census.csv", [&](std::ostream& o) { write_census_csv(o, groups); });
  if (sink.to_files()) {
    sink.file("census_compositions.csv", [&](std::ostream& o) {
      for (std::size_t i = 0; i < sys.size(); ++i) o << "r_" << i + 1 << ',';
      o << "count,length\n";
      for (const auto& e : c.entries) {
        for (int r : e.composition) o << r << ',';
        o << e.count << ',' << format_number(e.length) << '\n';
      }
    });
  }
  sink.summary({{"depth", std::to_string(c.depth)},
                {"compositions", std::to_string(c.entries.size())},
                {"segments", std::to_string(c.total())},
                {"distinct_lengths", std::to_string(groups.size())}});
  return kExitOk;
}

int cmd_estimate(const JobConfig& config, Sink& sink) {
  const Realization& ifs = need_geometry(config, "estimate");
  const ExpansionSchedule schedule = resolve_schedule(config);
  const int k_last = config.solver.depth;
  const int k_first = config.solver.k_first.value_or(std::max(1, k_last - 4));
  const DimEstimate est = estimate_mf_dim(ifs, schedule, k_first, k_last, config.solver.epsilon, sausage_options(config));
  sink.table("estimate.csv", [&](std::ostream& o) { write_samples_csv(o, est.samples); });
  sink.summary({{"k_range", std::to_string(k_first) + ":" + std::to_string(k_last)},
                {"epsilon", format_number(config.solver.epsilon)},
                {"slope", format_number(est.slope)},
                {"stderr", format_number(est.stderr_slope)},
                {"d_min", format_number(mf_dim_min(ifs.system))},
                {"d_max", format_number(mf_dim_max(ifs.system))}});
  return kExitOk;
}

int cmd_hessian(const JobConfig& config, Sink& sink) {
  const SelfSimilarSystem& sys = *config.system;
  const auto range = config.solver.lambda_range.value_or(std::make_pair(-5.0, 5.0));
  const std::vector<double> grid = tanh_grid(range.first, range.second, config.solver.grid, 0.0);
  std::size_t applicable = 0, maxima = 0, perturbation_failures = 0;
  double worst_recurrence = 0.0, worst_increase = -std::numeric_limits<double>::infinity();
  std::ostringstream table;
  table << "Lambda,applicable,verdict,recurrence_rel_error,perturbation_max_increase";
  for (std::size_t k = 2; k <= sys.size() + 1; ++k) table << ",H_" << k;
  table << '\n';
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double lam = grid[j];
    const HessianReport h = hessian_check(lam, sys);
    const MaximalityReport m = constrained_perturbation_check(lam, sys, config.solver.seed + j);
    table << format_number(lam) << ',' << (h.applicable ? 1 : 0) << ',' << (h.verdict ? 1 : 0) << ','
          << format_number(h.max_recurrence_rel_error) << ','
          << (m.applicable ? format_number(m.max_increase) : std::string("nan"));
    for (std::size_t k = 0; k < sys.size(); ++k) {
      table << ',' << (k < h.minors.size() ? format_number(h.minors[k]) : std::string("nan"));
    }
    table << '\n';
    if (h.applicable) {
      ++applicable;
      if (h.verdict) ++maxima;
      worst_recurrence = std::max(worst_recurrence, h.max_recurrence_rel_error);
    }
    if (m.applicable) {
      worst_increase = std::max(worst_increase, m.max_increase);
      if (m.max_increase > 1e-9) ++perturbation_failures;
    }
  }
  sink.table("hessian.csv", [&](std::ostream& o) { o << table.str(); });
  const bool ok = maxima == applicable && perturbation_failures == 0;
  sink.summary({{"instances", std::to_string(grid.size())},
                {"applicable", std::to_string(applicable)},
                {"local_maxima", std::to_string(maxima)},
                {"max_recurrence_rel_error", format_number(worst_recurrence)},
                {"max_perturbation_increase", format_number(worst_increase)},
                {"verdict", ok ? "maximum" : "not a maximum"}});
  return ok ? kExitOk : kExitNumerical;
}

}  // namespace

std::vector<double> parse_colon_list(const std::string& text, std::size_t parts, const std::string& flag) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = text.find(':', start);
    out.push_back(parse_real(text.substr(start, colon == std::string::npos ? std::string::npos : colon - start), flag));
    if (colon == std::string::npos) break;
    start = colon + 1;
  }
  if (out.size() != parts) {
    throw ValidationError(flag + ": expected " + std::to_string(parts) + " colon-separated numbers, got '" + text + "'");
  }
  return out;
}

std::vector<std::size_t> parse_schedule(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, comma - start);
    std::size_t v = 0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size() || v == 0) {
      throw ValidationError("--schedule: '" + item + "' is not a positive index");
    }
    out.push_back(v);
    start = comma + 1;
  }
  return out;
}

void apply_overrides(JobConfig& config, const CliOverrides& o) {
  if (o.out_dir) config.output.dir = *o.out_dir;
  if (o.depth) config.solver.depth = *o.depth;
  if (o.schedule && o.target_c) throw ValidationError("--schedule and --target-c are mutually exclusive");
  if (o.schedule) {
    config.expansion.schedule = parse_schedule(*o.schedule);
    config.expansion.target_c.reset();
  }
  if (o.target_c) {
    config.expansion.target_c = *o.target_c;
    config.expansion.schedule.reset();
  }
  if (o.epsilon) config.solver.epsilon = *o.epsilon;
  if (o.grid) config.solver.grid = *o.grid;
  if (o.lambda_range && o.omega_range) throw ValidationError("--lambda-range and --omega-range are mutually exclusive");
  if (o.lambda_range) {
    const auto v = parse_colon_list(*o.lambda_range, 2, "--lambda-range");
    config.solver.lambda_range = std::make_pair(v[0], v[1]);
    config.solver.omega_range.reset();
  }
  if (o.omega_range) {
    const auto v = parse_colon_list(*o.omega_range, 2, "--omega-range");
    config.solver.omega_range = std::make_pair(v[0], v[1]);
    config.solver.lambda_range.reset();
  }
  if (o.q_range) {
    const auto v = parse_colon_list(*o.q_range, 3, "--q-range");
    config.solver.q_range = {v[0], v[1], v[2]};
  }
  config.output.svg = config.output.svg || o.svg;
  config.output.shrink = config.output.shrink || o.shrink;
  config.output.invert = config.output.invert || o.invert;
  validate_settings(config);
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"dims",  "spectrum", "renyi",    "curve",
                                                 "expand", "census",   "estimate", "hessian"};
  return names;
}

int run(const std::string& subcommand, const JobConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (!config.system) throw ValidationError("config has no system");
    Sink sink(config, out);
    if (subcommand == "dims") return cmd_dims(config, sink);
    if (subcommand == "spectrum") return cmd_spectrum(config, sink);
    if (subcommand == "renyi") return cmd_renyi(config, sink);
    if (subcommand == "curve") return cmd_curve(config, sink);
    if (subcommand == "expand") return cmd_expand(config, sink);
    if (subcommand == "census") return cmd_census(config, sink);
    if (subcommand == "estimate") return cmd_estimate(config, sink);
    if (subcommand == "hessian") return cmd_hessian(config, sink);
    throw ValidationError("unknown subcommand '" + subcommand + "'");
  } catch (const ValidationError& e) {
    err << "error: " << subcommand << ": " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << subcommand << ": " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << subcommand << ": " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "numerical failure: " << subcommand << ": " << e.what() << '\n';
    return kExitNumerical;
  }
}

int run_with_config_file(const std::string& subcommand, const std::string& config_path, const CliOverrides& overrides,
                         std::ostream& out, std::ostream& err) {
  JobConfig config;
  try {
    config = load_config(config_path);
    apply_overrides(config, overrides);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return run(subcommand, config, out, err);
}

}  // namespace fractspec
