// SPDX-License-Identifier: Apache-2.0
//
// Melnikov function of the reversibly perturbed Duffing equation
//
//   x' = y,   y' = -x + x^3 + eps (alpha + beta y sin(omega t))
//
// along the heteroclinic orbit joining the saddles (-1, 0) and (1, 0).
#pragma once

#include "revmap/core.hpp"

#include <string>
#include <vector>

namespace revmap {

struct DuffingParams {
    double alpha = 1.0;
    double beta = 0.0;
    double omega = 1.0;
    double epsilon = 1.0; // only a prefactor at first order
};

Point2 heteroclinic_orbit(double t);
Point2 duffing_field(const Point2& p); // unperturbed

// M(t0) / eps by adaptive Gauss-Kronrod on [-T, T]; throws TailBound when the
// analytic tail estimate exceeds tol
double melnikov_quadrature(const DuffingParams& p, double t0, double T = 40.0, double tol = 1e-12);
// d/dt0 of the same integral
double melnikov_quadrature_dt0(const DuffingParams& p, double t0, double T = 40.0,
                               double tol = 1e-12);
double melnikov_tail_bound(const DuffingParams& p, double T);

// int sech^2(t / sqrt 2) dt
double I1_quadrature(double T = 40.0);
// amplitude of int sech^4(t / sqrt 2) sin(omega (t + t0)) dt
double I2_quadrature(double omega, double T = 40.0);
// (2 pi / 3) omega (omega^2 + 2) / sinh(omega pi / sqrt 2)
double I2_closed_form(double omega);
// the same with omega^2 in front, as printed
double I2_printed(double omega);

struct MelnikovProfile {
    double omega = 1.0;
    std::vector<double> t0;
    std::vector<double> values; // M(t0) / eps
    double constant_part = 0.0;
    double amplitude = 0.0;     // coefficient of sin(omega t0)
    double cos_part = 0.0;      // should vanish
    double fit_residual = 0.0;  // max deviation of the samples from the fit
    double fit(double t) const;
};

// samples one period and fits constant + amplitude sin(omega t0);
// throws FitResidualTooLarge above max_residual
MelnikovProfile melnikov_profile(const DuffingParams& p, int n_t0 = 64, double max_residual = 1e-6);

// |beta / alpha| at which M acquires a double zero, from quadrature profiles
double tangency_threshold(double omega);
// reference P(omega) = sqrt2 omega^2 (omega^2 + 2) / (3 sinh(omega pi / sqrt 2))
double reference_P(double omega);

enum class Splitting { Intersect, Tangent, Disjoint };
std::string to_string(Splitting s);

// throws DegenerateAlpha when alpha = 0
Splitting classify_splitting(const DuffingParams& p, double rel_tol = 1e-9);

struct DoubleZero {
    double t0 = 0.0;
    double M = 0.0;
    double dM = 0.0;
};

// extremum of M closest to zero over one period, by quadrature
DoubleZero double_zero(const DuffingParams& p);

} // namespace revmap
