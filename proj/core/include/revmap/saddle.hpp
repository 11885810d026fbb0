// SPDX-License-Identifier: Apache-2.0
//
// Reversible saddle normal form
//
//   xbar = lambda x (1 + h1(x,y) x y),   ybar = y (1 + h2(x,y) x y) / lambda
//
// its cross form, the boundary-value iteration for orbit segments and a
// finite-order reduction of polynomial saddles to this form.
#pragma once

#include "revmap/core.hpp"
#include "revmap/series.hpp"

#include <vector>

namespace revmap {

struct PolyMap2 {
    Series2 fx, fy;
    Point2 operator()(const Point2& p) const { return {fx.eval(p.x, p.y), fy.eval(p.x, p.y)}; }
    Mat2 jac(const Point2& p) const;
    int degree() const { return std::max(fx.degree(), fy.degree()); }
    PolyMap2 compose(const PolyMap2& inner) const; // this o inner, truncated
    PolyMap2 truncated(int d) const { return {fx.truncated(d), fy.truncated(d)}; }
    PlanarMap planar() const;
    static PolyMap2 identity(int d) { return {Series2::x(d), Series2::y(d)}; }
};

// Series inverse of a near-invertible polynomial map fixing the origin.
PolyMap2 series_inverse(const PolyMap2& F, int degree);

// Explicit series of a cross-form map xbar = X(x, ybar), y = Y(x, ybar).
// Needs dY/dybar(0) != 0.
PolyMap2 explicit_from_cross(const Series2& X, const Series2& Y, int degree);

// max coefficient of L F L F - id through the given degree
double series_reversibility_defect(const PolyMap2& F, int degree);

struct SaddleNF {
    double lambda = 0.5;
    Series2 h1{0};
    Series2 h2{0};
};

struct SaddleMaps {
    PlanarMap explicit_form;
    PlanarMap cross_form;
    Series2 hhat_x; // xbar = lambda x + hhat_x(x, ybar) x^2 ybar
    Series2 hhat_y; // y    = lambda ybar + hhat_y(x, ybar) x ybar^2
    // max |hhat_y(x, ybar) - hhat_x(ybar, x)| over coefficients; zero for an exactly
    // reversible normal form
    double cross_symmetry_defect = 0.0;
};

// normal form of the cross-form map xbar = lambda x + hhat(x, ybar) x^2 ybar,
// y = lambda ybar + hhat(ybar, x) x ybar^2, with h1, h2 truncated at `degree`
SaddleNF nf_from_cross(double lambda, const Series2& hhat, int degree);

// degree: truncation degree of hhat
SaddleMaps saddle_map(const SaddleNF& nf, int degree = 5);

struct BVPOrbitSegment {
    int j = 0;
    double x0 = 0.0, yj = 0.0;
    std::vector<Point2> points; // (x_s, y_s), s = 0..j
    double xj = 0.0, y0 = 0.0;
    std::vector<double> sweep_changes;
};

struct BVPOptions {
    double delta0 = 0.25;
    double tol = 1e-13;
    int max_sweeps = 200;
};

BVPOrbitSegment bvp_iterate(const SaddleNF& nf, double x0, double yj, int j,
                            const BVPOptions& opt = {});

struct ReductionReport {
    SaddleNF nf;
    PolyMap2 normal_form;  // the reduced map, degree D
    PolyMap2 change;       // z_old = change(z_new)
    double residual = 0.0; // max non-target coefficient after reduction
    double change_symmetry_defect = 0.0;
};

// Reduce an L-reversible polynomial saddle with fixed point at the origin.
ReductionReport reduce_to_main_nf(const PolyMap2& F, int degree = 5, double rev_tol = 1e-8);
ReductionReport reduce_to_main_nf(const PlanarMap& F, int degree = 5, double rev_tol = 1e-8);

// Polynomial L-reversible saddle from the cross form f(u, v) = a u + p(v),
// conjugated by phi(x, y) = (x + q(x - y), y + q(y - x)) with q even.
// p_coeffs[i] is the coefficient of v^(i+1); q_coeffs[i] of d^(2i+2).
PolyMap2 reversible_polynomial_saddle(double a, const std::vector<double>& p_coeffs,
                                      const std::vector<double>& q_coeffs, int degree);

} // namespace revmap
