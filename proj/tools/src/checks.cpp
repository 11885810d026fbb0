// SPDX-License-Identifier: Apache-2.0
#include "checks.hpp"

#include "revmap/birkhoff.hpp"
#include "revmap/errors.hpp"
#include "revmap/firstreturn.hpp"
#include "revmap/hmap.hpp"
#include "revmap/melnikov.hpp"
#include "revmap/rotators.hpp"
#include "revmap/saddle.hpp"

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <cmath>

namespace revmap::cli {

namespace {

using Rng = boost::random::mt19937_64;

double uniform(Rng& g, double a, double b) { return boost::random::uniform_real_distribution<double>(a, b)(g); }

HParams random_params(Rng& g) {
    double c = 0.0;
    while (std::abs(c) < 0.05) c = uniform(g, -3.0, 3.0);
    return {c, uniform(g, -5.0, 5.0)};
}

std::vector<Point2> random_box(Rng& g, int n, double r) {
    std::vector<Point2> v;
    for (int i = 0; i < n; ++i) v.push_back({uniform(g, -r, r), uniform(g, -r, r)});
    return v;
}

CheckResult at_most(std::string name, double value, double threshold) {
    return {std::move(name), value, threshold, std::isfinite(value) && value <= threshold};
}

} // namespace

std::vector<CheckResult> run_checks(const CheckOptions& opt) {
    Rng g(opt.seed);
    std::vector<CheckResult> out;
    const int n = opt.samples;

    {
        double area = 0.0, fac = 0.0, rev = 0.0;
        for (int i = 0; i < n; ++i) {
            const HParams h = random_params(g);
            const Point2 p{uniform(g, -3.0, 3.0), uniform(g, -3.0, 3.0)};
            area = std::max(area, std::abs(jac_H(h, p).determinant() - 1.0));
            const auto [H1, H2] = henon_factors(h);
            const Point2 a = eval_H(h, p), b = evaluate(H2, evaluate(H1, p));
            fac = std::max(fac, norm_inf(a - b) / (1.0 + norm_inf(a)));
            rev = std::max(rev, reversibility_residual(h_map(h), Involution::swap_xy(), {p}));
        }
        out.push_back(at_most("H area preservation", area, 1e-10));
        out.push_back(at_most("H = H2 o H1", fac, 1e-12));
        out.push_back(at_most("H reversibility under L", rev, 1e-10));
    }

    {
        double mismatches = 0.0;
        for (int i = 0; i < std::max(1, n / 10); ++i) {
            const HParams h = random_params(g);
            if (numeric_fixed_points(h).size() != all_fixed_points(h).size()) mismatches += 1.0;
        }
        out.push_back(at_most("fixed-point census", mismatches, 0.0));
    }

    {
        double worst = 0.0;
        for (CurveId id : all_curves()) {
            const bool res = id == CurveId::RES13 || id == CurveId::RES14;
            for (int i = 0; i < 10; ++i) {
                double c = 0.0;
                do c = uniform(g, -3.0, 3.0);
                while (std::abs(c) < 0.05 || !curve_domain_ok(id, c));
                for (int br : res ? std::vector<int>{1, -1} : std::vector<int>{0}) {
                    const HParams h{c, curve_M(id, c, br)};
                    const double tr = jac_H(h, curve_point(id, c, br)).trace();
                    worst = std::max(worst, std::abs(tr - curve_trace(id)));
                }
            }
        }
        out.push_back(at_most("bifurcation curve multipliers", worst, 1e-7));
    }

    {
        double worst = 0.0;
        int done = 0;
        while (done < 4) {
            const HParams h = random_params(g);
            const Which w = uniform(g, 0.0, 1.0) < 0.5 ? Which::Plus : Which::Minus;
            const double s = h.c_tilde - 1.0;
            if (s * s + 4.0 * h.M_tilde < 0.0) continue;
            const double p = p_of(h, w);
            const double co = symmetric_trace(h.c_tilde, p) / 2.0;
            if (!(std::abs(co) < 0.95) || !resonance_guard(std::acos(co), 0.05).ok) continue;
            const double closed = b1_closed_form(h.c_tilde, p);
            if (std::abs(closed) < 1e-3) continue;
            const double num = bnf_order3_numeric(rotation_form(h, w)).B1;
            worst = std::max(worst, std::abs(num - closed) / std::abs(closed));
            ++done;
        }
        out.push_back(at_most("B1 closed form vs numeric", worst, 1e-5));
    }

    {
        Series2 hh(3);
        hh.at(0, 0) = 0.3;
        hh.at(1, 0) = 0.1;
        hh.at(0, 2) = -0.2;
        const SaddleMaps sm = saddle_map(nf_from_cross(0.5, hh, 8), 5);
        const auto pts = random_box(g, 50, 0.1);
        out.push_back(at_most("saddle cross form reversibility",
                              reversibility_residual(sm.cross_form, Involution::swap_xy(), pts), 1e-8));
    }

    {
        ReturnInstance inst;
        inst.k = 8;
        inst.m = balanced_m(inst.coeffs, inst.k);
        inst.M = M_of_Mtilde(inst, 3.5);
        const PlanarMap T = build_Tkm(inst);
        std::vector<Point2> pts;
        const double sc = h_scale(inst);
        for (const Point2& z : random_box(g, 10, 1.0)) pts.push_back(z * sc);
        out.push_back(at_most("T_km reversibility", reversibility_residual(T, Involution::swap_xy(), pts), 1e-8));
        const AsymmetricPair pr = asymmetric_jacobians(inst);
        out.push_back(at_most("T_km J_plus J_minus = 1", std::abs(pr.J_plus * pr.J_minus - 1.0), 1e-8));
    }

    {
        double i2 = 0.0, dz = 0.0;
        for (double w : {0.5, 1.0, 2.0}) {
            i2 = std::max(i2, std::abs(I2_quadrature(w) - I2_closed_form(w)) / I2_closed_form(w));
            const DoubleZero d = double_zero({1.0, tangency_threshold(w), w});
            dz = std::max({dz, std::abs(d.M), std::abs(d.dM)});
        }
        out.push_back(at_most("Melnikov I2 closed form", i2, 1e-7));
        out.push_back(at_most("Melnikov double zero at threshold", dz, 1e-8));
    }

    if (opt.with_rotators) {
        std::vector<Point2> pts;
        for (const Point2& p : random_torus_points(4, opt.seed)) pts.push_back(p);
        const double eps = 0.3;
        out.push_back(at_most("rotators T = (S o T_half)^2", factorization_residual(eps, pts), 1e-6));
        out.push_back(at_most("rotators full map reversibility",
                              rotator_reversibility_residual(full_map(eps), reversor_R(), pts), 1e-6));
        out.push_back(at_most("rotators half map reversibility",
                              rotator_reversibility_residual(half_map(eps), reversor_R1(), pts), 1e-6));
    }
    return out;
}

} // namespace revmap::cli
