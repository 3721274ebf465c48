#include "fractspec/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "fractspec/dimension.hpp"
#include "fractspec/errors.hpp"

namespace fractspec {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ValidationError("config: " + path + ": " + what);
}

void reject_unknown(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) fail(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
  }
}

double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

long long as_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long long>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected true or false");
  return v.get<bool>();
}

std::vector<double> as_reals(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_real(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::pair<double, double> as_range(const json& v, const std::string& path) {
  const auto xs = as_reals(v, path);
  if (xs.size() != 2) fail(path, "expected [lo, hi]");
  return {xs[0], xs[1]};
}

std::size_t as_count(const json& v, const std::string& path) {
  const long long x = as_integer(v, path);
  if (x < 1) fail(path, "expected a positive integer");
  return static_cast<std::size_t>(x);
}

std::vector<bool> read_flips(const json& v) {
  if (!v.is_array()) fail("flips", "expected an array of booleans");
  std::vector<bool> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_bool(v[i], "flips[" + std::to_string(i) + "]"));
  return out;
}

Generatrix read_generatrix(const json& v, const json* flips) {
  if (!v.is_array()) fail("generatrix", "expected an array of [x, y] points");
  Generatrix g;
  g.vertices.resize(2, static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string p = "generatrix[" + std::to_string(i) + "]";
    const auto xy = as_reals(v[i], p);
    if (xy.size() != 2) fail(p, "expected [x, y]");
    g.vertices(0, static_cast<Eigen::Index>(i)) = xy[0];
    g.vertices(1, static_cast<Eigen::Index>(i)) = xy[1];
  }
  if (flips != nullptr) g.flips = read_flips(*flips);
  return g;
}

void read_solver(const json& s, SolverSettings& out) {
  reject_unknown(s, "solver",
                 {"depth", "k_first", "segment_cap", "composition_cap", "cell_cap", "epsilon", "cell_size", "grid",
                  "lambda_range", "omega_range", "q_range", "tanh_stretch", "seed"});
  if (s.contains("depth")) out.depth = static_cast<int>(std::clamp<long long>(as_integer(s["depth"], "solver.depth"), -1, 1 << 20));
  if (s.contains("k_first")) out.k_first = static_cast<int>(std::clamp<long long>(as_integer(s["k_first"], "solver.k_first"), -1, 1 << 20));
  if (s.contains("segment_cap")) out.segment_cap = as_count(s["segment_cap"], "solver.segment_cap");
  if (s.contains("composition_cap")) out.composition_cap = as_count(s["composition_cap"], "solver.composition_cap");
  if (s.contains("cell_cap")) out.cell_cap = as_count(s["cell_cap"], "solver.cell_cap");
  if (s.contains("epsilon")) out.epsilon = as_real(s["epsilon"], "solver.epsilon");
  if (s.contains("cell_size")) out.cell_size = as_real(s["cell_size"], "solver.cell_size");
  if (s.contains("grid")) out.grid = static_cast<int>(std::clamp<long long>(as_integer(s["grid"], "solver.grid"), -1, 1 << 30));
  if (s.contains("lambda_range")) out.lambda_range = as_range(s["lambda_range"], "solver.lambda_range");
  if (s.contains("omega_range")) out.omega_range = as_range(s["omega_range"], "solver.omega_range");
  if (s.contains("q_range")) {
    const auto xs = as_reals(s["q_range"], "solver.q_range");
    if (xs.size() != 3) fail("solver.q_range", "expected [lo, hi, step]");
    out.q_range = {xs[0], xs[1], xs[2]};
  }
  if (s.contains("tanh_stretch")) out.tanh_stretch = as_real(s["tanh_stretch"], "solver.tanh_stretch");
  if (s.contains("seed")) {
    const long long x = as_integer(s["seed"], "solver.seed");
    if (x < 0) fail("solver.seed", "expected a nonnegative integer");
    out.seed = static_cast<std::uint64_t>(x);
  }
}

void read_expansion(const json& e, ExpansionSettings& out) {
  reject_unknown(e, "expansion", {"schedule", "target_c"});
  if (e.contains("schedule") && e.contains("target_c")) fail("expansion", "give either schedule or target_c");
  if (e.contains("schedule")) {
    const json& s = e["schedule"];
    if (!s.is_array()) fail("expansion.schedule", "expected an array of 1-based indices");
    std::vector<std::size_t> steps;
    for (std::size_t i = 0; i < s.size(); ++i) steps.push_back(as_count(s[i], "expansion.schedule[" + std::to_string(i) + "]"));
    out.schedule = steps;
  }
  if (e.contains("target_c")) out.target_c = as_real(e["target_c"], "expansion.target_c");
}

void read_output(const json& o, OutputSettings& out) {
  reject_unknown(o, "output", {"dir", "svg", "shrink", "invert"});
  if (o.contains("dir")) {
    if (!o["dir"].is_string()) fail("output.dir", "expected a string");
    out.dir = o["dir"].get<std::string>();
  }
  if (o.contains("svg")) out.svg = as_bool(o["svg"], "output.svg");
  if (o.contains("shrink")) out.shrink = as_bool(o["shrink"], "output.shrink");
  if (o.contains("invert")) out.invert = as_bool(o["invert"], "output.invert");
}

}  // namespace

JobConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config: syntax error: ") + e.what());
  }
  reject_unknown(doc, "", {"name", "contractors", "weights", "generatrix", "flips", "tent_family", "solver",
                           "expansion", "output"});

  JobConfig cfg;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail("name", "expected a string");
    cfg.name = doc["name"].get<std::string>();
  }
  const int sources = static_cast<int>(doc.contains("contractors")) + static_cast<int>(doc.contains("generatrix")) +
                      static_cast<int>(doc.contains("tent_family"));
  if (sources != 1) fail("(root)", "exactly one of contractors, generatrix, tent_family is required");
  if (doc.contains("flips") && doc.contains("contractors")) fail("flips", "flips need a generatrix");

  std::optional<Eigen::VectorXd> weights;
  if (doc.contains("weights")) {
    const auto w = as_reals(doc["weights"], "weights");
    weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
  }

  if (doc.contains("contractors")) {
    const auto a = as_reals(doc["contractors"], "contractors");
    cfg.system = build_system(Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size())), weights);
  } else {
    Generatrix g;
    if (doc.contains("generatrix")) {
      g = read_generatrix(doc["generatrix"], doc.contains("flips") ? &doc["flips"] : nullptr);
    } else {
      g = tent_family_generatrix(as_real(doc["tent_family"], "tent_family"));
      if (doc.contains("flips")) g.flips = read_flips(doc["flips"]);
    }
    Realization r = system_from_generatrix(g);
    if (weights) r.system = r.system.with_weights(*weights);
    cfg.system = r.system;
    cfg.realization = std::move(r);
  }

  if (doc.contains("solver")) read_solver(doc["solver"], cfg.solver);
  if (doc.contains("expansion")) read_expansion(doc["expansion"], cfg.expansion);
  if (doc.contains("output")) read_output(doc["output"], cfg.output);
  validate_settings(cfg);
  return cfg;
}

JobConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("config: cannot read " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void validate_settings(const JobConfig& config) {
  const SolverSettings& s = config.solver;
  auto range_check = [](bool ok, const std::string& path, const std::string& what) {
    if (!ok) fail(path, what);
  };
  range_check(s.depth >= 1 && s.depth <= 64, "solver.depth", "must be in [1, 64]");
  if (s.k_first) range_check(*s.k_first >= 1 && *s.k_first <= s.depth, "solver.k_first", "must be in [1, depth]");
  range_check(s.epsilon > 0.0, "solver.epsilon", "must be positive");
  if (s.cell_size) range_check(*s.cell_size > 0.0 && *s.cell_size <= s.epsilon / 4.0, "solver.cell_size", "must be in (0, epsilon/4]");
  range_check(s.grid >= 2 && s.grid <= 1000000, "solver.grid", "must be in [2, 1000000]");
  if (s.lambda_range) range_check(s.lambda_range->first < s.lambda_range->second, "solver.lambda_range", "needs lo < hi");
  if (s.omega_range) range_check(s.omega_range->first < s.omega_range->second, "solver.omega_range", "needs lo < hi");
  range_check(s.q_range.step > 0.0 && s.q_range.lo <= s.q_range.hi, "solver.q_range", "needs lo <= hi and step > 0");
  range_check((s.q_range.hi - s.q_range.lo) / s.q_range.step <= 1e6, "solver.q_range", "more than 10^6 points");
  range_check(s.tanh_stretch >= 0.0 && s.tanh_stretch <= 10.0, "solver.tanh_stretch", "must be in [0, 10]");

  const ExpansionSettings& e = config.expansion;
  if (e.schedule && e.target_c) fail("expansion", "give either schedule or target_c");
  if (e.schedule && config.system) {
    for (std::size_t i = 0; i < e.schedule->size(); ++i) {
      const std::size_t v = (*e.schedule)[i];
      if (v < 1 || v > config.system->size()) {
        fail("expansion.schedule[" + std::to_string(i) + "]",
             "index " + std::to_string(v) + " outside 1.." + std::to_string(config.system->size()));
      }
    }
  }
}

ExpansionSchedule resolve_schedule(const JobConfig& config) {
  if (config.expansion.schedule) {
    std::vector<std::size_t> steps;
    for (std::size_t v : *config.expansion.schedule) steps.push_back(v - 1);
    return ExpansionSchedule::explicit_steps(steps);
  }
  if (config.expansion.target_c) return schedule_for(*config.system, *config.expansion.target_c);
  throw ValidationError("expansion: a schedule or a target contractor is required");
}

}  // namespace fractspec
