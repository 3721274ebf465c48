#include "fractspec/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace fractspec {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";  // folds -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string format_fixed6(double x) {
  if (std::abs(x) < 5e-7) x = 0.0;
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::fixed, 6);
  return std::string(buf, res.ptr);
}

void write_key_values(std::ostream& out, const KeyValues& rows) {
  for (const auto& [k, v] : rows) out << k << " = " << v << '\n';
}

void write_key_values_csv(std::ostream& out, const KeyValues& rows) {
  out << "key,value\n";
  for (const auto& [k, v] : rows) out << k << ',' << v << '\n';
}

void write_spectrum_csv(std::ostream& out, const SpectrumCurve<double>& curve, bool with_endpoints) {
  const Eigen::Index n = curve.contractors.size();
  out << "Lambda,Omega,alpha,f";
  for (Eigen::Index i = 0; i < n; ++i) out << ",lambda_" << (i + 1);
  out << '\n';
  auto endpoint_row = [&](const SpectrumEndpoint& e, double multiplier) {
    out << format_number(multiplier) << ',' << format_number(-multiplier) << ',' << format_number(e.alpha) << ','
        << format_number(e.f);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_number(e.frequencies(i));
    out << '\n';
  };
  const double inf = std::numeric_limits<double>::infinity();
  const bool ends = with_endpoints && !curve.monofractal;
  if (ends) endpoint_row(curve.left, inf);
  for (std::size_t j = 0; j < curve.points.size(); ++j) {
    const auto& p = curve.points[j];
    out << format_number(p.multiplier) << ',' << format_number(p.omega) << ',' << format_number(p.alpha) << ','
        << format_number(p.f);
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_number(curve.frequencies(i, static_cast<Eigen::Index>(j)));
    out << '\n';
  }
  if (ends) endpoint_row(curve.right, -inf);
}

KeyValues annotation_rows(const SpectrumAnnotations& ann) {
  KeyValues rows = {
      {"D_0", format_number(ann.d_zero)},
      {"D_1", format_number(ann.d_one)},
      {"D_tilde", ann.d_tilde ? format_number(*ann.d_tilde) : "none"},
      {"d_min", format_number(ann.d_min)},
      {"d_max", format_number(ann.d_max)},
      {"Omega_min", ann.omega_min ? format_number(*ann.omega_min) : "none"},
      {"alpha_min", format_number(ann.alpha_min)},
      {"alpha_max", format_number(ann.alpha_max)},
      {"f_at_alpha_min", format_number(ann.f_at_alpha_min)},
      {"f_at_alpha_max", format_number(ann.f_at_alpha_max)},
  };
  return rows;
}

void write_renyi_csv(std::ostream& out, const std::vector<std::pair<double, double>>& rows) {
  out << "q,D_q\n";
  for (const auto& [q, d] : rows) out << format_number(q) << ',' << format_number(d) << '\n';
}

void write_census_csv(std::ostream& out, const std::vector<LengthGroup>& groups) {
  out << "length,count\n";
  for (const auto& g : groups) out << format_number(g.length) << ',' << g.count << '\n';
}

void write_vertices_csv(std::ostream& out, const Polyline& polyline) {
  out << "x,y\n";
  for (Eigen::Index j = 0; j < polyline.vertices.cols(); ++j) {
    out << format_number(polyline.vertices(0, j)) << ',' << format_number(polyline.vertices(1, j)) << '\n';
  }
}

void write_svg(std::ostream& out, const Polyline& polyline) {
  const Eigen::Vector2d lo = polyline.vertices.rowwise().minCoeff();
  const Eigen::Vector2d hi = polyline.vertices.rowwise().maxCoeff();
  const double diam = std::max(diameter(polyline), 1e-12);
  const Eigen::Vector2d size = (hi - lo).cwiseMax(Eigen::Vector2d::Constant(1e-9 * diam));
  const double margin = 0.05 * std::max(size.x(), size.y());
  // SVG y grows downward, so flip
  auto sx = [&](double x) { return format_fixed6(x - lo.x() + margin); };
  auto sy = [&](double y) { return format_fixed6(hi.y() - y + margin); };
  const double width = size.x() + 2 * margin;
  const double height = size.y() + 2 * margin;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << format_fixed6(width) << ' '
      << format_fixed6(height) << "\">\n";
  out << "<path fill=\"none\" stroke=\"black\" stroke-width=\"" << format_fixed6(0.002 * diam) << "\" d=\"";
  for (Eigen::Index j = 0; j < polyline.vertices.cols(); ++j) {
    out << (j == 0 ? "M" : " L") << sx(polyline.vertices(0, j)) << ',' << sy(polyline.vertices(1, j));
  }
  out << "\"/>\n</svg>\n";
}

KeyValues discrete_spectrum_rows(const std::vector<DiscreteSpectrumEntry>& entries) {
  KeyValues rows;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const auto& e = entries[k];
    const std::string key = "mf_spectrum." + std::to_string(k + 1);
    std::ostringstream idx;
    for (std::size_t j = 0; j < e.indices.size(); ++j) idx << (j ? " " : "") << e.indices[j] + 1;
    rows.emplace_back(key + ".contractor", format_number(e.contractor));
    rows.emplace_back(key + ".indices", idx.str());
    if (e.kind == DiscreteSpectrumEntry::Kind::Exact) {
      rows.emplace_back(key + ".value", format_number(*e.value));
    } else {
      rows.emplace_back(key + ".lower", format_number(e.lower));
      rows.emplace_back(key + ".upper", format_number(e.upper));
      if (e.empirical) rows.emplace_back(key + ".empirical", format_number(*e.empirical));
    }
  }
  return rows;
}

}  // namespace fractspec
