// SPDX-License-Identifier: Apache-2.0
#include "revmap/birkhoff.hpp"
#include "revmap/errors.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <numbers>

namespace revmap {

using cplx = std::complex<double>;

namespace {

// polynomial in (z, conj z) truncated at total degree 3
struct ZPoly {
    std::array<std::array<cplx, 4>, 4> a{};
    cplx& operator()(int j, int k) { return a[j][k]; }
    cplx operator()(int j, int k) const { return a[j][k]; }
    ZPoly mul(const ZPoly& o) const {
        ZPoly r;
        for (int j = 0; j < 4; ++j)
            for (int k = 0; j + k < 4; ++k)
                for (int l = 0; j + k + l < 4; ++l)
                    for (int m = 0; j + k + l + m < 4; ++m) r.a[j + l][k + m] += a[j][k] * o.a[l][m];
        return r;
    }
};

ZPoly from_real(const Series2& fx, const Series2& fy) {
    ZPoly X, Y, one;
    X(1, 0) = 0.5;
    X(0, 1) = 0.5;
    Y(1, 0) = cplx(0, -0.5);
    Y(0, 1) = cplx(0, 0.5);
    one(0, 0) = 1.0;
    std::array<ZPoly, 4> xp{one}, yp{one};
    for (int n = 1; n < 4; ++n) {
        xp[n] = xp[n - 1].mul(X);
        yp[n] = yp[n - 1].mul(Y);
    }
    ZPoly out;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; m + n < 4; ++n) {
            cplx coef(fx.coeff(m, n), fy.coeff(m, n));
            if (coef == cplx(0)) continue;
            ZPoly t = xp[m].mul(yp[n]);
            for (int j = 0; j < 4; ++j)
                for (int k = 0; j + k < 4; ++k) out(j, k) += coef * t(j, k);
        }
    return out;
}

std::pair<Series2, Series2> fit_once(const MapFn& f, const Point2& c, double h) {
    constexpr int R = 4, D = 6;
    constexpr int nterm = (D + 1) * (D + 2) / 2;
    const int npts = (2 * R + 1) * (2 * R + 1);
    Eigen::MatrixXd A(npts, nterm);
    Eigen::MatrixXd b(npts, 2);
    const Point2 f0 = f(c);
    int row = 0;
    for (int i = -R; i <= R; ++i)
        for (int j = -R; j <= R; ++j, ++row) {
            int col = 0;
            for (int d = 0; d <= D; ++d)
                for (int n = 0; n <= d; ++n, ++col)
                    A(row, col) = std::pow(double(i), d - n) * std::pow(double(j), n);
            Point2 v = f({c.x + i * h, c.y + j * h});
            b(row, 0) = v.x - f0.x;
            b(row, 1) = v.y - f0.y;
        }
    Eigen::MatrixXd sol = A.colPivHouseholderQr().solve(b);
    Series2 sx(3), sy(3);
    sx.at(0, 0) = f0.x;
    sy.at(0, 0) = f0.y;
    int col = 1;
    for (int d = 1; d <= D; ++d)
        for (int n = 0; n <= d; ++n, ++col) {
            if (d > 3) continue;
            const double scale = std::pow(h, d);
            sx.at(d - n, n) = sol(col, 0) / scale;
            sy.at(d - n, n) = sol(col, 1) / scale;
        }
    return {sx, sy};
}

} // namespace

double p_of(const HParams& h, Which w) {
    const double s = h.c_tilde - 1.0;
    const double D = s * s + 4.0 * h.M_tilde;
    if (D < 0.0) throw NotElliptic("no symmetric fixed points");
    const double r = std::sqrt(D);
    return w == Which::Plus ? (s + r) / 2 : (s - r) / 2;
}

RotationFormMap rotation_form(const HParams& h, Which w) {
    const double c = h.c_tilde;
    const double p = p_of(h, w);
    const double co = symmetric_trace(c, p) / 2.0;
    if (!(std::abs(co) < 1.0)) throw NotElliptic("|trace| >= 2 at p = " + std::to_string(p));
    if (p == 0.0) throw DegenerateDenominator("rotation form needs p != 0");
    const double s = std::sqrt(1.0 - co * co);
    RotationFormMap rf;
    rf.psi = std::atan2(s, co);
    rf.p = p;
    rf.c_tilde = c;
    const double qx = -2.0 * p * co / (c * s);
    const double ex = (1.0 - 4.0 * p * p - c * co) / (4.0 * c * c * p * p * s);
    const double qy = -2.0 * p / c;
    const double ey = 1.0 / (4.0 * c * p * p);
    rf.evaluator = PlanarMap::explicit_map([=](const Point2& z) {
        const double E = -c * s * z.x + (1.0 - c * co) * z.y + 2.0 * p * z.y * z.y;
        return Point2{co * z.x - s * z.y + qx * z.y * z.y + ex * E * E,
                      s * z.x + co * z.y + qy * z.y * z.y + ey * E * E};
    });
    return rf;
}

double P4(double c, double p) {
    const double p2 = p * p;
    return 64.0 * p2 * p2 + 8.0 * (1.0 - c) * p2 * p - 4.0 * (3.0 * c * c + 4.0 * c + 3.0) * p2 +
           2.0 * (c - 1.0) * (c + 1.0) * (c + 1.0) * p -
           (c - 1.0) * (c - 1.0) * (c + 1.0) * (c + 1.0);
}

double b1_closed_form(double c, double p) {
    if (p == 0.0 || c == 0.0) throw DegenerateDenominator("p = 0 or c = 0");
    const double co = symmetric_trace(c, p) / 2.0;
    if (!(std::abs(co) < 1.0)) throw NotElliptic("|trace| >= 2");
    const double s = std::sqrt(1.0 - co * co);
    const double den3 = 2.0 * co + 1.0;
    if (std::abs(den3) < 1e-12) throw Resonant("1:3 resonance");
    const double num = (c + 1.0 - 2.0 * p) * (c + 1.0 + 2.0 * p) * (c - 1.0 + 2.0 * p);
    return num / (32.0 * std::pow(c, 4) * p * s * s * s * den3) * P4(c, p);
}

ResonanceCheck resonance_guard(double psi, double tol) {
    const double two_pi = 2.0 * std::numbers::pi;
    double a = std::fmod(psi, two_pi);
    if (a < 0) a += two_pi;
    for (int k = 1; k <= 4; ++k)
        for (int j = 0; j <= k; ++j)
            if (std::abs(a - two_pi * j / k) < tol) return {false, k};
    return {true, 0};
}

std::pair<Series2, Series2> taylor3(const MapFn& f, const Point2& center, double h) {
    auto [ax, ay] = fit_once(f, center, h);
    auto [bx, by] = fit_once(f, center, h / 2);
    // leading error in the cubic coefficients is O(h^4)
    return {(bx * 16.0 - ax) * (1.0 / 15.0), (by * 16.0 - ay) * (1.0 / 15.0)};
}

BNFResult bnf_order3_numeric(const PlanarMap& map, double psi, double resonance_tol) {
    auto rc = resonance_guard(psi, resonance_tol);
    if (!rc.ok) throw StrongResonance("psi near a root of unity of order " + std::to_string(rc.order));
    auto [fx, fy] = taylor3([&](const Point2& z) { return evaluate(map, z); }, {0, 0});
    ZPoly A = from_real(fx, fy);
    const cplx lam = std::polar(1.0, psi), lamc = std::conj(lam);

    // degree-2 elimination: h_jk (lam^j conj(lam)^k - lam) = A_jk
    const cplx h20 = A(2, 0) / (lam * lam - lam);
    const cplx h11 = A(1, 1) / (lam * lamc - lam);
    const cplx h02 = A(0, 2) / (lamc * lamc - lam);
    // resonant cubic coefficient after the change: [DA.h + C]_(2,1)
    const cplx d21 = A(2, 1) + 2.0 * A(2, 0) * h11 + A(1, 1) * h20 + A(1, 1) * std::conj(h11) +
                     2.0 * A(0, 2) * std::conj(h02);
    BNFResult r;
    r.psi = psi;
    r.d21 = d21;
    const cplx b = cplx(0, -1) * d21 * lamc;
    r.B1 = b.real();
    r.B1_imag = b.imag();
    return r;
}

BNFResult bnf_order3_numeric(const RotationFormMap& rf) {
    return bnf_order3_numeric(rf.evaluator, rf.psi);
}

BNFResult bnf_at_fixed_point(const PlanarMap& map, const Point2& fp, double resonance_tol) {
    Mat2 J = jacobian(map, fp);
    const double det = J.determinant();
    if (!(det > 0.0)) throw NotElliptic("orientation-reversing linear part");
    J /= std::sqrt(det);
    const double co = J.trace() / 2.0;
    if (!(std::abs(co) < 1.0)) throw NotElliptic("|trace| >= 2");
    double s = std::sqrt(1.0 - co * co);
    Mat2 K = (J - co * Mat2::Identity()) / s;
    if (K(1, 0) < 0.0) {
        K = -K;
        s = -s;
    }
    // T = [e1, K e1] / sqrt(K21) has det 1 and T^{-1} J T = rotation
    Mat2 T;
    T << 1.0, K(0, 0), 0.0, K(1, 0);
    T /= std::sqrt(K(1, 0));
    const Mat2 Ti = T.inverse();
    auto conj_map = PlanarMap::explicit_map([&, T, Ti](const Point2& u) {
        Eigen::Vector2d w = T * Eigen::Vector2d(u.x, u.y);
        Point2 g = evaluate(map, {fp.x + w(0), fp.y + w(1)}) - fp;
        Eigen::Vector2d v = Ti * Eigen::Vector2d(g.x, g.y);
        return Point2{v(0), v(1)};
    });
    return bnf_order3_numeric(conj_map, std::atan2(s, co), resonance_tol);
}

std::vector<B1ZeroPoint> b1_zero_curves(const std::vector<double>& c_grid, Which w) {
    std::vector<B1ZeroPoint> out;
    for (double c : c_grid) {
        if (c == 0.0) continue;
        const double k3 = 8.0 * (1.0 - c), k2 = -4.0 * (3.0 * c * c + 4.0 * c + 3.0);
        const double k1 = 2.0 * (c - 1.0) * (c + 1.0) * (c + 1.0);
        const double k0 = -(c - 1.0) * (c - 1.0) * (c + 1.0) * (c + 1.0);
        Eigen::Matrix4d comp = Eigen::Matrix4d::Zero();
        comp(0, 3) = -k0 / 64.0;
        comp(1, 3) = -k1 / 64.0;
        comp(2, 3) = -k2 / 64.0;
        comp(3, 3) = -k3 / 64.0;
        comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
        Eigen::EigenSolver<Eigen::Matrix4d> es(comp, false);
        std::vector<double> roots;
        for (int i = 0; i < 4; ++i) {
            cplx r = es.eigenvalues()(i);
            if (std::abs(r.imag()) > 1e-9 * (1.0 + std::abs(r.real()))) continue;
            double p = r.real();
            for (int it = 0; it < 4; ++it) {
                const double d = 256.0 * p * p * p + 3.0 * k3 * p * p + 2.0 * k2 * p + k1;
                if (d == 0.0) break;
                p -= P4(c, p) / d;
            }
            roots.push_back(p);
        }
        std::sort(roots.begin(), roots.end());
        for (double p : roots) {
            const bool plus = p >= (c - 1.0) / 2.0;
            if (plus != (w == Which::Plus)) continue;
            const double co = symmetric_trace(c, p) / 2.0;
            if (!(std::abs(co) < 1.0) || p == 0.0 || std::abs(2.0 * co + 1.0) < 1e-9) continue;
            out.push_back({c, M_of_p(c, p), p});
        }
    }
    return out;
}

double henon_b1_closed(double phi) {
    const double s = std::sin(phi), co = std::cos(phi);
    return (1.0 / (4.0 * s * s)) * (1.0 + co) * (1.0 + 4.0 * co) / (s * (1.0 + 2.0 * co));
}

} // namespace revmap
