// SPDX-License-Identifier: Apache-2.0
//
// Three coupled rotators
//
//   psi1' = 1 - 2 eps sin psi1 + eps sin psi2
//   psi2' = 1 - 2 eps sin psi2 + eps sin psi1 + eps sin psi3
//   psi3' = 1 - 2 eps sin psi3 + eps sin psi2
//
// and the reduced system in (xi, eta, rho) with rho' = 1, whose Poincare maps
// between sections rho = const are computed with rho as the independent
// variable.
#pragma once

#include "revmap/core.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace revmap {

using Vec3 = std::array<double, 3>;

struct PTOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
};

double wrap_angle(double a); // into [0, 2 pi)
double angle_diff(double a, double b); // shortest signed arc a - b
double angle_dist(const Point2& a, const Point2& b); // componentwise shortest arc, max norm

Vec3 pik1_field(const Vec3& psi, double eps);
// throws DenominatorVanishes when 2 + eps cos(rho - eta) can reach zero
Vec3 pik4_field(const Vec3& s, double eps);

// xi = (psi1 - psi3)/2, eta = (psi1 + psi3 - pi)/2, rho = eta + psi2 - 3 pi / 2
Vec3 to_reduced(const Vec3& psi);
Vec3 from_reduced(const Vec3& s);
inline double time_factor(const Vec3& s, double eps) { return 2.0 + eps * std::cos(s[2] - s[1]); }

struct PoincareSection {
    double from_rho = 0.0;
    double to_rho = 6.283185307179586;
    double epsilon = 0.3;
    PTOptions ode;
};

// integrates the reduced system between the sections; the image is wrapped
Point2 poincare_map(const PoincareSection& sec, const Point2& p);

struct MapJac {
    Point2 image; // wrapped
    Mat2 J;
};
MapJac poincare_map_jac(const PoincareSection& sec, const Point2& p);

// S(xi, eta) = (pi - xi, eta + pi)
Point2 S_map(const Point2& p);

// full map 0 -> 2 pi, half map 0 -> pi, and the square root S o T_half
PlanarMap full_map(double eps, const PTOptions& opt = {});
PlanarMap half_map(double eps, const PTOptions& opt = {});
PlanarMap root_map(double eps, const PTOptions& opt = {});
// inverse of the full map, integrating rho from 2 pi down to 0
PlanarMap full_map_inverse(double eps, const PTOptions& opt = {});

Involution reversor_R();  // (xi, -eta)
Involution reversor_R1(); // (pi - xi, pi - eta)

// max over samples of |T_full(p) - (S o T_half)^2(p)| in the angle metric
double factorization_residual(double eps, const std::vector<Point2>& samples, const PTOptions& opt = {});
// |R T R T p - p| for T = full (R) or half (R1) maps, angle metric
double rotator_reversibility_residual(const PlanarMap& map, const Involution& R,
                                      const std::vector<Point2>& samples);

std::vector<Point2> random_torus_points(std::size_t n, std::uint64_t seed);

struct PeriodicOrbit {
    std::vector<Point2> points;  // p, T p, ..., T^{n-1} p
    FixedPointRecord record;     // of T^n at points[0]
    bool symmetric = false;      // R maps the orbit to itself
    double root_residual = 0.0;  // |G^n p - p| with G = S o T_half
    std::string root_label;      // "fixed" or "period2" under G^n
    FixedPointRecord root_record; // of G^n at points[0]
};

// symmetric seeds come from the reflection test on eta = 0 and eta = pi; the
// remaining seeds are given or default to a regular grid
std::vector<PeriodicOrbit> find_periodic(double eps, int n, const std::vector<Point2>& seeds = {},
                                         const PTOptions& opt = {}, int grid = 12);

// sin(eta) after flowing from (xi0, eta0) at rho = 0 to rho = n pi; zeros with
// eta0 in {0, pi} are symmetric points of period n
double reflection_test(double eps, int n, double xi0, double eta0, const PTOptions& opt = {});

struct FoldResult {
    double eps_star = 0.0;
    double interval = 0.0;
    Point2 point;                     // nascent symmetric point
    std::array<std::complex<double>, 2> multipliers; // of T^n there
};

// bisection on the existence of symmetric period-n orbits (n odd);
// throws BracketInvalid
FoldResult fold_locate(int n, double eps_lo, double eps_hi, double tol = 1e-8,
                       const PTOptions& opt = {});
// min over the symmetry lines of the signed reflection test; negative once
// symmetric period-n orbits exist
double fold_indicator(double eps, int n, const PTOptions& opt = {}, Point2* argmin = nullptr);

struct Histogram2D {
    int bins = 128;
    std::vector<std::uint64_t> counts; // row-major, xi index first
    std::uint64_t total() const;
    double frac(int i, int j) const;
    Histogram2D reflected_eta() const; // eta -> -eta
};
double half_l1(const Histogram2D& a, const Histogram2D& b);

struct MeasureOptions {
    int bins = 128;
    int n_samples = 10000;
    int n_steps = 1000;
    int burn_in = 200;
    std::uint64_t seed = 1;
    int threads = 1;
    PTOptions ode{1e-8, 1e-10};
};

struct MeasureHalf {
    Histogram2D hist;
    int dropped = 0;
};

// direction +1 iterates T, -1 iterates T^{-1}. Sample i starts at p_i for the
// forward run and at R(p_i) for the backward run.
MeasureHalf measure_iteration(double eps, const MeasureOptions& opt, int direction);

struct MeasurePair {
    Histogram2D forward_hist, backward_hist;
    int n_iterations = 0, n_samples = 0;
    std::uint64_t seed = 0;
    int dropped = 0;
    double asymmetry = 0.0;         // half L1 between forward and backward
    double reflected_distance = 0.0; // half L1 between forward and R(backward)
};

MeasurePair measure_pair(double eps, const MeasureOptions& opt);

} // namespace revmap
