// SPDX-License-Identifier: Apache-2.0
#include "revmap/melnikov.hpp"
#include "revmap/errors.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

namespace revmap {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

double sech2(double u) {
    const double c = std::cosh(u);
    return 1.0 / (c * c);
}

template <class F>
double integrate(F f, double T, double tol) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    // split at the origin where the integrand is concentrated
    double err = 0.0;
    const double a = GK::integrate(f, -T, 0.0, 15, tol * 1e-3, &err);
    const double b = GK::integrate(f, 0.0, T, 15, tol * 1e-3, &err);
    return a + b;
}

} // namespace

Point2 heteroclinic_orbit(double t) {
    const double u = t / kSqrt2;
    return {std::tanh(u), sech2(u) / kSqrt2};
}

Point2 duffing_field(const Point2& p) { return {p.y, -p.x + p.x * p.x * p.x}; }

double melnikov_tail_bound(const DuffingParams& p, double T) {
    // sech^2 u <= 4 exp(-2u), so each tail is at most 2 exp(-sqrt2 T) (|alpha| + |beta|/sqrt2)
    return 4.0 * std::exp(-kSqrt2 * T) * (std::abs(p.alpha) + std::abs(p.beta) / kSqrt2);
}

double melnikov_quadrature(const DuffingParams& p, double t0, double T, double tol) {
    if (melnikov_tail_bound(p, T) > tol) throw TailBound("tail above tolerance at T = " + std::to_string(T));
    auto f = [&](double t) {
        const double s = sech2(t / kSqrt2);
        return (s / kSqrt2) * (p.alpha + (p.beta / kSqrt2) * s * std::sin(p.omega * (t + t0)));
    };
    return integrate(f, T, tol);
}

double melnikov_quadrature_dt0(const DuffingParams& p, double t0, double T, double tol) {
    if (melnikov_tail_bound(p, T) > tol) throw TailBound("tail above tolerance at T = " + std::to_string(T));
    auto f = [&](double t) {
        const double s = sech2(t / kSqrt2);
        return 0.5 * p.beta * s * s * p.omega * std::cos(p.omega * (t + t0));
    };
    return integrate(f, T, tol);
}

double I1_quadrature(double T) {
    return integrate([](double t) { return sech2(t / kSqrt2); }, T, 1e-14);
}

double I2_quadrature(double omega, double T) {
    return integrate(
        [omega](double t) {
            const double s = sech2(t / kSqrt2);
            return s * s * std::cos(omega * t);
        },
        T, 1e-14);
}

double I2_closed_form(double omega) {
    return (2.0 * kPi / 3.0) * omega * (omega * omega + 2.0) / std::sinh(omega * kPi / kSqrt2);
}

double I2_printed(double omega) { return omega * I2_closed_form(omega); }

double MelnikovProfile::fit(double t) const {
    return constant_part + amplitude * std::sin(omega * t) + cos_part * std::cos(omega * t);
}

MelnikovProfile melnikov_profile(const DuffingParams& p, int n_t0, double max_residual) {
    if (!(p.omega > 0.0)) throw DomainError("omega must be positive");
    if (n_t0 < 4) throw DomainError("need at least 4 samples");
    MelnikovProfile prof;
    prof.omega = p.omega;
    const double period = 2.0 * kPi / p.omega;
    Eigen::MatrixXd A(n_t0, 3);
    Eigen::VectorXd b(n_t0);
    for (int i = 0; i < n_t0; ++i) {
        const double t0 = period * i / n_t0;
        const double v = melnikov_quadrature(p, t0);
        prof.t0.push_back(t0);
        prof.values.push_back(v);
        A(i, 0) = 1.0;
        A(i, 1) = std::sin(p.omega * t0);
        A(i, 2) = std::cos(p.omega * t0);
        b(i) = v;
    }
    Eigen::Vector3d sol = A.colPivHouseholderQr().solve(b);
    prof.constant_part = sol(0);
    prof.amplitude = sol(1);
    prof.cos_part = sol(2);
    for (int i = 0; i < n_t0; ++i)
        prof.fit_residual = std::max(prof.fit_residual, std::abs(prof.values[i] - prof.fit(prof.t0[i])));
    // a cosine component means the profile is not of the claimed shape
    prof.fit_residual = std::max(prof.fit_residual, std::abs(prof.cos_part));
    if (prof.fit_residual > max_residual)
        throw FitResidualTooLarge("fit residual " + std::to_string(prof.fit_residual));
    return prof;
}

double tangency_threshold(double omega) {
    const double c = melnikov_profile({1.0, 0.0, omega}, 16).constant_part;
    const double a = melnikov_profile({0.0, 1.0, omega}, 16).amplitude;
    return std::abs(c / a);
}

double reference_P(double omega) {
    return kSqrt2 * omega * omega * (omega * omega + 2.0) / (3.0 * std::sinh(omega * kPi / kSqrt2));
}

std::string to_string(Splitting s) {
    switch (s) {
    case Splitting::Intersect: return "intersect";
    case Splitting::Tangent: return "tangent";
    case Splitting::Disjoint: return "disjoint";
    }
    return "?";
}

Splitting classify_splitting(const DuffingParams& p, double rel_tol) {
    if (p.alpha == 0.0) throw DegenerateAlpha("alpha = 0");
    const double r = std::abs(p.beta / p.alpha);
    const double th = tangency_threshold(p.omega);
    if (std::abs(r - th) <= rel_tol * th) return Splitting::Tangent;
    return r > th ? Splitting::Intersect : Splitting::Disjoint;
}

DoubleZero double_zero(const DuffingParams& p) {
    // M = C + A sin(omega t0); the extremum nearest zero has sin = -sign(C A)
    const double C = melnikov_quadrature({p.alpha, 0.0, p.omega}, 0.0);
    const double A = melnikov_quadrature({0.0, p.beta, p.omega}, kPi / (2.0 * p.omega));
    const double s = (C * A > 0.0) ? -1.0 : 1.0;
    DoubleZero dz;
    dz.t0 = s * kPi / (2.0 * p.omega);
    if (dz.t0 < 0.0) dz.t0 += 2.0 * kPi / p.omega;
    dz.M = melnikov_quadrature(p, dz.t0);
    dz.dM = melnikov_quadrature_dt0(p, dz.t0);
    return dz;
}

} // namespace revmap
