// SPDX-License-Identifier: Apache-2.0
//
// The conservative truncation H of the first-return map, a product of two
// Henon maps:
//
//   xbar = M + c x - y^2,   y = M + c ybar - xbar^2
#pragma once

#include "revmap/core.hpp"

#include <string>
#include <utility>
#include <vector>

namespace revmap {

struct HParams {
    double c_tilde = -1.0;
    double M_tilde = 0.0;
};

Point2 eval_H(const HParams& h, const Point2& p);
Point2 eval_H_inverse(const HParams& h, const Point2& p);
Mat2 jac_H(const HParams& h, const Point2& p);

// explicit form; analytic Jacobian attached unless analytic_jac is false
PlanarMap h_map(const HParams& h, bool analytic_jac = true);
// the implicit L-symmetric pair
PlanarMap h_map_implicit(const HParams& h);

// (H1, H2) with H = H2 o H1
std::pair<PlanarMap, PlanarMap> henon_factors(const HParams& h);

std::vector<FixedPointRecord> symmetric_fixed_points(const HParams& h);
std::vector<FixedPointRecord> all_fixed_points(const HParams& h);

// Classification by trace: elliptic, saddle (positive multipliers),
// flip_saddle (negative multipliers) or parabolic.
std::string kind_label(const FixedPointRecord& fp);

std::pair<double, double> trace_det(const HParams& h, const FixedPointRecord& fp);

enum class CurveId { F1, F2, PD1p, PD2p, PF1p, PDp34, PF2p, PD3p, PFpm, PDpm, RES13, RES14 };

std::string to_string(CurveId id);
std::vector<CurveId> all_curves();

struct BifCurveSample {
    CurveId curve_id;
    double c_tilde;
    double M_tilde;
    int branch = 0; // +1 / -1 for the resonance curves, 0 otherwise
};

bool curve_domain_ok(CurveId id, double c);
double curve_M(CurveId id, double c, int branch = 0);
// trace the designated fixed point must have on the curve
double curve_trace(CurveId id);
// fixed point carrying the curve's multiplier condition
Point2 curve_point(CurveId id, double c, int branch = 0);

// throws DomainError if any grid value is outside the curve's c-range
std::vector<BifCurveSample> bif_curve(CurveId id, const std::vector<double>& c_grid);

struct RegionResult {
    std::string label;
    int n_fixed = 0;
    int n_symmetric = 0;
    std::vector<FixedPointRecord> points; // numeric, sorted: p+, p-, then the pair
    std::vector<std::string> kinds;
    bool matches_prediction = false;
};

constexpr double kCurveTol = 1e-9;

RegionResult classify_region(const HParams& h);

// numeric census through core::find_fixed_points
std::vector<FixedPointRecord> numeric_fixed_points(const HParams& h, double tol = 1e-12);

} // namespace revmap
