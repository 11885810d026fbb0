// SPDX-License-Identifier: Apache-2.0
//
// First Birkhoff coefficient of the symmetric elliptic points of H.
#pragma once

#include "revmap/core.hpp"
#include "revmap/hmap.hpp"
#include "revmap/series.hpp"

#include <complex>
#include <vector>

namespace revmap {

enum class Which { Plus, Minus };

struct RotationFormMap {
    double psi = 0.0; // in (0, pi)
    double p = 0.0;
    double c_tilde = 0.0;
    PlanarMap evaluator;
};

struct BNFResult {
    double psi = 0.0;
    std::complex<double> d21;
    double B1 = 0.0;
    double B1_imag = 0.0; // should vanish for conservative maps
};

struct ResonanceCheck {
    bool ok = true;
    int order = 0; // smallest k in 1..4 with psi near 2 pi j / k
};

double p_of(const HParams& h, Which w);
// inverse of the symmetric fixed-point relation
inline double M_of_p(double c, double p) { return p * p - (c - 1.0) * p; }
inline double symmetric_trace(double c, double p) { return c + (1.0 - 4.0 * p * p) / c; }

// shifted, Jordan-normalized map with a rotation by psi as linear part
RotationFormMap rotation_form(const HParams& h, Which w);

double P4(double c, double p);
double b1_closed_form(double c, double p);

ResonanceCheck resonance_guard(double psi, double tol);

// Taylor coefficients up to total degree 3 of both components of f around
// center, by least squares on a 9x9 stencil with Richardson extrapolation.
std::pair<Series2, Series2> taylor3(const MapFn& f, const Point2& center, double h = 0.02);

// BNF of a map fixing the origin whose linear part is the rotation by psi.
BNFResult bnf_order3_numeric(const PlanarMap& map, double psi, double resonance_tol = 1e-4);
BNFResult bnf_order3_numeric(const RotationFormMap& rf);

// BNF at an elliptic fixed point of an area-preserving map, after an
// orientation-preserving unimodular change that turns the linear part into a
// rotation. The returned psi lies in (-pi, pi) and is intrinsic.
BNFResult bnf_at_fixed_point(const PlanarMap& map, const Point2& fp,
                             double resonance_tol = 1e-4);

struct B1ZeroPoint {
    double c_tilde;
    double M_tilde;
    double p;
};

// zeros of P4 that are elliptic points of the requested branch
std::vector<B1ZeroPoint> b1_zero_curves(const std::vector<double>& c_grid, Which w);

// closed-form B1 of the square-root Henon map at c = -1, p = -cos(phi)
double henon_b1_closed(double phi);

} // namespace revmap
