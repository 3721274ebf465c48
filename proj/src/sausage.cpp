#include "fractspec/sausage.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <utility>

#include "fractspec/errors.hpp"
#include "fractspec/report.hpp"

namespace fractspec {

namespace {

struct Interval {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool empty() const { return !(lo <= hi); }
  void hull(double l, double h) {
    if (!(l <= h)) return;
    lo = std::min(lo, l);
    hi = std::max(hi, h);
  }
};

// {x : c0 + c1 x in [lo, hi]} intersected into `range`.
void restrict_linear(double c0, double c1, double lo, double hi, Interval& range) {
  if (c1 == 0.0) {
    if (c0 < lo || c0 > hi) range = Interval{};
    return;
  }
  double l = (lo - c0) / c1;
  double h = (hi - c0) / c1;
  if (l > h) std::swap(l, h);
  range.lo = std::max(range.lo, l);
  range.hi = std::min(range.hi, h);
}

// Slice of the radius-eps stadium around segment ab on the line at height y.
// The stadium is convex, so the slice is the hull of the slices of its parts.
Interval stadium_slice(const Point2& a, const Point2& b, double eps, double y) {
  Interval out;
  for (const Point2* c : {&a, &b}) {
    const double dy = y - c->y();
    const double r2 = eps * eps - dy * dy;
    if (r2 >= 0.0) {
      const double r = std::sqrt(r2);
      out.hull(c->x() - r, c->x() + r);
    }
  }
  const Point2 d = b - a;
  const double len = d.norm();
  if (len > 0.0) {
    const Point2 u = d / len;
    // along = (p - a).u in [0, len], across = cross(u, p - a) in [-eps, eps], p = (x, y)
    const double ry = y - a.y();
    Interval band{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    restrict_linear(-a.x() * u.x() + ry * u.y(), u.x(), 0.0, len, band);
    restrict_linear(u.x() * ry + a.x() * u.y(), -u.y(), -eps, eps, band);
    if (!band.empty()) out.hull(band.lo, band.hi);
  }
  return out;
}

double log_checked(double x, const char* what) {
  if (!(x > 0.0)) {
    std::ostringstream msg;
    msg << "fit_log_log: " << what << " must be positive";
    throw NumericalError(msg.str());
  }
  return std::log(x);
}

}  // namespace

std::uint64_t cell_cap_from_env() {
  const char* raw = std::getenv("FRACTSPEC_CELL_CAP");
  if (raw == nullptr || *raw == '\0') return kDefaultCellCap;
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(raw, &end, 10);
  if (errno != 0 || end == raw || *end != '\0' || v == 0 || std::string(raw).find('-') != std::string::npos) {
    throw ValidationError(std::string("FRACTSPEC_CELL_CAP must be a positive integer, got '") + raw + "'");
  }
  return static_cast<std::uint64_t>(v);
}

SausageArea sausage_area(const Polyline& polyline, double epsilon, const SausageOptions& options) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ValidationError("sausage_area: epsilon must be positive");
  if (polyline.vertices.cols() < 2) throw ValidationError("sausage_area: polyline needs at least 2 vertices");
  const double max_cell = epsilon / 4.0;
  double h = options.cell_size > 0.0 ? options.cell_size : max_cell;
  if (h > max_cell * (1.0 + 1e-12)) throw ValidationError("sausage_area: cell size must not exceed epsilon / 4");
  const std::uint64_t cap = options.cell_cap > 0 ? options.cell_cap : cell_cap_from_env();

  const Eigen::Vector2d lo = polyline.vertices.rowwise().minCoeff().array() - epsilon;
  const Eigen::Vector2d hi = polyline.vertices.rowwise().maxCoeff().array() + epsilon;
  const Eigen::Vector2d extent = hi - lo;

  SausageArea out;
  auto grid_cells = [&](double pitch, std::uint64_t& nx, std::uint64_t& ny) {
    nx = static_cast<std::uint64_t>(std::ceil(extent.x() / pitch));
    ny = static_cast<std::uint64_t>(std::ceil(extent.y() / pitch));
    return static_cast<long double>(nx) * static_cast<long double>(ny);
  };
  std::uint64_t nx = 0, ny = 0;
  long double cells = grid_cells(h, nx, ny);
  // ceil() on the extents can leave one pass slightly over, hence the loop
  while (cells > static_cast<long double>(cap)) {
    if (h >= max_cell) {
      std::ostringstream msg;
      msg << "sausage_area: raster of " << static_cast<double>(cells) << " cells exceeds the cap of " << cap
          << " even at cell size epsilon / 4";
      throw NumericalError(msg.str());
    }
    h = std::min(max_cell, h * std::sqrt(static_cast<double>(cells / cap)) * (1.0 + 1e-6));
    out.coarsened = true;
    cells = grid_cells(h, nx, ny);
  }
  out.cell_size = h;
  out.grid_cells = static_cast<std::uint64_t>(cells);

  // per row, integer ranges of covered cell columns
  std::vector<std::vector<std::pair<long long, long long>>> rows(ny);
  const auto segments = polyline.segment_count();
  for (std::size_t s = 0; s < segments; ++s) {
    const Point2 a = polyline.vertices.col(static_cast<Eigen::Index>(s));
    const Point2 b = polyline.vertices.col(static_cast<Eigen::Index>(s + 1));
    const double y_lo = std::min(a.y(), b.y()) - epsilon;
    const double y_hi = std::max(a.y(), b.y()) + epsilon;
    // rows whose centre lo.y + (j + 1/2) h lies in [y_lo, y_hi]
    const long long j0 = std::max<long long>(0, static_cast<long long>(std::ceil((y_lo - lo.y()) / h - 0.5)));
    const long long j1 =
        std::min<long long>(static_cast<long long>(ny) - 1, static_cast<long long>(std::floor((y_hi - lo.y()) / h - 0.5)));
    for (long long j = j0; j <= j1; ++j) {
      const double y = lo.y() + (static_cast<double>(j) + 0.5) * h;
      const Interval slice = stadium_slice(a, b, epsilon, y);
      if (slice.empty()) continue;
      const long long i0 = std::max<long long>(0, static_cast<long long>(std::ceil((slice.lo - lo.x()) / h - 0.5)));
      const long long i1 = std::min<long long>(static_cast<long long>(nx) - 1,
                                               static_cast<long long>(std::floor((slice.hi - lo.x()) / h - 0.5)));
      if (i0 <= i1) rows[static_cast<std::size_t>(j)].emplace_back(i0, i1);
    }
  }

  std::uint64_t covered = 0;
  for (auto& row : rows) {
    if (row.empty()) continue;
    std::sort(row.begin(), row.end());
    long long cur_lo = row.front().first;
    long long cur_hi = row.front().second;
    for (std::size_t k = 1; k < row.size(); ++k) {
      if (row[k].first <= cur_hi + 1) {
        cur_hi = std::max(cur_hi, row[k].second);
      } else {
        covered += static_cast<std::uint64_t>(cur_hi - cur_lo + 1);
        cur_lo = row[k].first;
        cur_hi = row[k].second;
      }
    }
    covered += static_cast<std::uint64_t>(cur_hi - cur_lo + 1);
    std::vector<std::pair<long long, long long>>().swap(row);
  }
  out.covered_cells = covered;
  out.area = static_cast<double>(covered) * h * h;
  return out;
}

DimEstimate fit_log_log(std::vector<SausageSample> samples) {
  if (samples.size() < 3) throw ValidationError("fit_log_log: need at least 3 samples");
  const Eigen::Index n = static_cast<Eigen::Index>(samples.size());
  Eigen::MatrixXd design(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    design(i, 0) = 1.0;
    design(i, 1) = log_checked(s.delta, "diameter");
    y(i) = log_checked(s.area, "area");
  }
  const double spread = design.col(1).maxCoeff() - design.col(1).minCoeff();
  if (!(spread > 0.0)) throw NumericalError("fit_log_log: all diameters are equal");
  const Eigen::Vector2d beta = design.colPivHouseholderQr().solve(y);
  const Eigen::VectorXd resid = y - design * beta;
  const Eigen::VectorXd xc = design.col(1).array() - design.col(1).mean();
  DimEstimate out;
  out.intercept = beta(0);
  out.slope = beta(1);
  out.stderr_slope = n > 2 ? std::sqrt(resid.squaredNorm() / static_cast<double>(n - 2) / xc.squaredNorm()) : 0.0;
  out.samples = std::move(samples);
  return out;
}

DimEstimate estimate_mf_dim(const Realization& ifs, const ExpansionSchedule& schedule, int k_first, int k_last,
                            double epsilon, const SausageOptions& options) {
  if (k_first < 1 || k_last - k_first < 2) {
    throw ValidationError("estimate_mf_dim: need at least 3 depths starting at 1 or more");
  }
  const auto sequence = expand_sequence(ifs, schedule, k_last, options.segment_cap);
  std::vector<SausageSample> samples;
  for (int k = k_first; k <= k_last; ++k) {
    const auto& p = sequence[static_cast<std::size_t>(k - 1)].polyline;
    SausageSample s;
    s.depth = k;
    s.epsilon = epsilon;
    s.delta = diameter(p);
    s.area = sausage_area(p, epsilon, options).area;
    samples.push_back(s);
  }
  DimEstimate est = fit_log_log(std::move(samples));
  if (!(est.slope >= 0.5 && est.slope <= 2.5)) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "estimate_mf_dim: slope " << est.slope << " outside the sanity band [0.5, 2.5]";
    throw NumericalError(msg.str());
  }
  return est;
}

void annotate_with_estimates(std::vector<DiscreteSpectrumEntry>& entries, const Realization& ifs, int k_first,
                             int k_last, double epsilon, const SausageOptions& options) {
  for (auto& e : entries) {
    if (e.kind != DiscreteSpectrumEntry::Kind::Bracketed || e.indices.empty()) continue;
    try {
      e.empirical =
          estimate_mf_dim(ifs, ExpansionSchedule::constant(e.indices.front()), k_first, k_last, epsilon, options).slope;
    } catch (const NumericalError&) {
      e.empirical.reset();
    }
  }
}

void write_samples_csv(std::ostream& out, const std::vector<SausageSample>& samples) {
  out << "k,epsilon,delta,area,log_delta,log_area\n";
  for (const auto& s : samples) {
    out << s.depth << ',' << format_number(s.epsilon) << ',' << format_number(s.delta) << ','
        << format_number(s.area) << ',' << format_number(std::log(s.delta)) << ',' << format_number(std::log(s.area))
        << '\n';
  }
}

}  // namespace fractspec
