#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "fractspec/dimension.hpp"
#include "fractspec/multifractal.hpp"
#include "fractspec/prefractal.hpp"

namespace fractspec {

/// Shortest decimal that reads back to the same double; inf, -inf, nan spelled out.
std::string format_number(double x);

/// SVG coordinates: fixed 6 decimals, trailing zeros kept.
std::string format_fixed6(double x);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// "key = value" lines.
void write_key_values(std::ostream& out, const KeyValues& rows);
/// key,value CSV with header.
void write_key_values_csv(std::ostream& out, const KeyValues& rows);

/// Lambda,Omega,alpha,f,lambda_1..lambda_N. With endpoints, the analytic
/// alpha_min / alpha_max rows bracket the samples with infinite multipliers.
void write_spectrum_csv(std::ostream& out, const SpectrumCurve<double>& curve, bool with_endpoints = true);

KeyValues annotation_rows(const SpectrumAnnotations& ann);

void write_renyi_csv(std::ostream& out, const std::vector<std::pair<double, double>>& rows);

/// length,count ascending in length.
void write_census_csv(std::ostream& out, const std::vector<LengthGroup>& groups);

/// x,y per vertex.
void write_vertices_csv(std::ostream& out, const Polyline& polyline);

/// Single-path SVG, viewBox fitted with a 5% margin, stroke 0.2% of the diameter.
void write_svg(std::ostream& out, const Polyline& polyline);

KeyValues discrete_spectrum_rows(const std::vector<DiscreteSpectrumEntry>& entries);

}  // namespace fractspec
