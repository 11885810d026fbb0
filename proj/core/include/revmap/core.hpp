// SPDX-License-Identifier: Apache-2.0
//
// Planar maps in explicit, cross and implicit form, involutions, Newton
// solvers and the reversibility / area checks shared by every module.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace revmap {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double norm(const Point2& p) { return std::hypot(p.x, p.y); }
inline double norm_inf(const Point2& p) { return std::max(std::abs(p.x), std::abs(p.y)); }

using Mat2 = Eigen::Matrix2d;

struct Rect {
    double x0 = -1.0, x1 = 1.0, y0 = -1.0, y1 = 1.0;
    bool contains(const Point2& p) const {
        return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1;
    }
};

struct Grid {
    Rect rect;
    int nx = 16;
    int ny = 16;
};

using MapFn = std::function<Point2(const Point2&)>;
using JacFn = std::function<Mat2(const Point2&)>;
using ScalarFn2 = std::function<double(double, double)>;
// residual(p, image) for a map given implicitly
using ResidualFn = std::function<Point2(const Point2&, const Point2&)>;

enum class MapForm { Explicit, Cross, Implicit };

struct PlanarMap {
    MapForm form = MapForm::Explicit;
    MapFn fwd;           // explicit
    ScalarFn2 cross_x;   // cross: xbar = cross_x(x, ybar)
    ScalarFn2 cross_y;   //        y    = cross_y(x, ybar)
    ResidualFn residual; // implicit
    JacFn jac;           // optional analytic Jacobian
    std::optional<Rect> domain;
    MapFn predictor; // initial guess for the image; identity if empty

    static PlanarMap explicit_map(MapFn f, JacFn j = {}, std::optional<Rect> dom = {});
    static PlanarMap cross(ScalarFn2 xbar, ScalarFn2 y_of, std::optional<Rect> dom = {});
    // xbar = f(x, ybar), y = f(ybar, x)
    static PlanarMap cross_reversible(ScalarFn2 f, std::optional<Rect> dom = {});
    static PlanarMap implicit(ResidualFn g, std::optional<Rect> dom = {});
    // g(x, y, xbar, ybar) = 0 and g(ybar, xbar, y, x) = 0
    static PlanarMap implicit_reversible(std::function<double(double, double, double, double)> g,
                                         std::optional<Rect> dom = {});
};

struct NewtonOptions {
    double tol = 1e-12;
    int max_iter = 50;
    double fd_step = 1e-6; // relative
};

struct NewtonResult {
    Point2 z;
    double residual = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Damped Newton for F(z) = 0. Residual is measured in the max norm and
// scaled by (1 + |z|).
NewtonResult newton2(const MapFn& F, Point2 z0, const NewtonOptions& opt = {},
                     const JacFn& J = {});

Mat2 fd_jacobian(const MapFn& f, const Point2& p, double h = 0.0);

Point2 evaluate(const PlanarMap& map, const Point2& p, double tol = 1e-12);
Mat2 jacobian(const PlanarMap& map, const Point2& p, double h = 0.0);

struct Involution {
    MapFn apply;
    JacFn linear_part;
    std::string label;

    Point2 operator()(const Point2& p) const { return apply(p); }
    static Involution swap_xy();  // L(x, y) = (y, x)
    static Involution flip_y();   // (x, y) -> (x, -y)
    static Involution negate();   // (x, y) -> (-x, -y)
};

double reversibility_residual(const PlanarMap& map, const Involution& R,
                              const std::vector<Point2>& samples, double tol = 1e-12);
double involution_residual(const Involution& R, const std::vector<Point2>& samples);

// psi = R + DR|_p, so that psi o R = DR|_p o psi
PlanarMap bochner_conjugacy(const Involution& R, const Point2& p);
double conjugacy_residual(const PlanarMap& psi, const Involution& R, const Mat2& A,
                          const std::vector<Point2>& samples);

double area_preservation_residual(const PlanarMap& map, const std::vector<Point2>& samples);

enum class FixedKind { Saddle, Elliptic, Parabolic, Attracting, Repelling };
std::string to_string(FixedKind k);

struct FixedPointRecord {
    Point2 location;
    std::array<std::complex<double>, 2> multipliers;
    FixedKind kind = FixedKind::Saddle;
    double jac_det = 1.0;
    bool symmetric = false;
    double trace() const { return (multipliers[0] + multipliers[1]).real(); }
};

constexpr double kParabolicBand = 1e-7;
constexpr double kSymmetryTol = 1e-8;
constexpr double kDedupTol = 1e-8;

// multipliers, determinant and kind from a Jacobian
FixedPointRecord classify(const Point2& where, const Mat2& J,
                          double band = kParabolicBand);

// Roots at degenerate fixed points are only located to about eps^(1/3), so two
// roots (or a root and its R-image) count as one when their midpoint is a root.
std::vector<FixedPointRecord> find_fixed_points(const PlanarMap& map, const Grid& grid,
                                                double tol = 1e-12,
                                                const Involution* R = nullptr);

// Worker count from REVMAP_THREADS, else 1.
int default_threads();
// Runs body(i) for i in [0, n) on up to `threads` workers. Results must be
// written to per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

} // namespace revmap
