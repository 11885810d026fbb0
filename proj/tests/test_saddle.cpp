// SPDX-License-Identifier: Apache-2.0
#include "gen.hpp"

#include "revmap/errors.hpp"
#include "revmap/saddle.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace revmap;
using revmap::testing::Gen;

namespace {

Series2 sample_hhat() {
    Series2 hh(3);
    hh.at(0, 0) = 0.3;
    hh.at(1, 0) = 0.1;
    hh.at(0, 2) = -0.2;
    return hh;
}

// the explicit normal form as a polynomial of degree D
PolyMap2 nf_polynomial(const SaddleNF& nf, int D) {
    const Series2 x = Series2::x(D), y = Series2::y(D), xy = x.mul(y);
    Series2 h1(D), h2(D);
    for (int i = 0; i <= nf.h1.degree(); ++i)
        for (int j = 0; i + j <= nf.h1.degree(); ++j) {
            h1.at(i, j) = nf.h1.coeff(i, j);
            h2.at(i, j) = nf.h2.coeff(i, j);
        }
    return {x * nf.lambda + x.mul(xy).mul(h1) * nf.lambda,
            y * (1.0 / nf.lambda) + y.mul(xy).mul(h2) * (1.0 / nf.lambda)};
}

} // namespace

TEST(SaddleMap, LinearSaddle) {
    const SaddleNF nf{0.5, Series2(0), Series2(0)};
    const SaddleMaps m = saddle_map(nf, 3);
    const Point2 e = evaluate(m.explicit_form, {0.1, 0.1});
    EXPECT_DOUBLE_EQ(e.x, 0.05);
    EXPECT_DOUBLE_EQ(e.y, 0.2);
    const Point2 c = evaluate(m.cross_form, {1.0, 1.0});
    EXPECT_NEAR(c.x, 0.5, 1e-14);
    EXPECT_NEAR(c.y, 2.0, 1e-12);
    const Mat2 J = jacobian(m.explicit_form, {0, 0});
    EXPECT_NEAR(J(0, 0), 0.5, 1e-10);
    EXPECT_NEAR(J(1, 1), 2.0, 1e-10);
}

TEST(SaddleMap, NormalFormIsReversible) {
    const SaddleNF nf = nf_from_cross(0.5, sample_hhat(), 8);
    EXPECT_NEAR(nf.h1.coeff(0, 0), -nf.h2.coeff(0, 0), 1e-14);
    const SaddleMaps m = saddle_map(nf, 8);
    EXPECT_LT(m.cross_symmetry_defect, 1e-14);
    Gen g(41);
    const auto pts = g.points(200, 0.1);
    EXPECT_LT(reversibility_residual(m.explicit_form, Involution::swap_xy(), pts), 1e-9);
    EXPECT_LT(reversibility_residual(m.cross_form, Involution::swap_xy(), pts), 1e-9);
}

TEST(SaddleMap, AxesAreInvariant) {
    const SaddleMaps m = saddle_map(nf_from_cross(0.5, sample_hhat(), 8), 8);
    Gen g(42);
    for (int i = 0; i < 50; ++i) {
        const double t = g.uniform(-0.2, 0.2);
        EXPECT_EQ(evaluate(m.explicit_form, {t, 0.0}).y, 0.0);
        EXPECT_EQ(evaluate(m.explicit_form, {0.0, t}).x, 0.0);
        EXPECT_DOUBLE_EQ(evaluate(m.explicit_form, {t, 0.0}).x, 0.5 * t);
    }
}

TEST(SaddleMapProperty, CrossAndExplicitFormsAgree) {
    Gen g(43);
    for (int trial = 0; trial < 5; ++trial) {
        Series2 hh(3);
        for (int i = 0; i <= 3; ++i)
            for (int j = 0; i + j <= 3; ++j) hh.at(i, j) = g.uniform(-0.3, 0.3);
        const double lam = g.uniform(0.3, 0.8);
        // the gap is truncation error of the cross-form series; it grows like
        // |z|^D lambda^-D, so small lambda needs the smaller box
        const SaddleMaps m = saddle_map(nf_from_cross(lam, hh, 10), 10);
        double worst = 0.0;
        for (const Point2& z : g.points(1000, 0.05)) {
            const Point2 a = evaluate(m.explicit_form, z), b = evaluate(m.cross_form, z);
            worst = std::max(worst, norm_inf(a - b));
        }
        EXPECT_LT(worst, 1e-10) << "trial " << trial << " lambda " << lam;
    }
}

TEST(BVP, LinearSaddleIsExact) {
    const SaddleNF nf{0.5, Series2(0), Series2(0)};
    for (int j : {1, 5, 17}) {
        const auto seg = bvp_iterate(nf, 0.1, -0.07, j);
        EXPECT_EQ(seg.xj, std::pow(0.5, j) * 0.1);
        EXPECT_EQ(seg.y0, std::pow(0.5, j) * -0.07);
        ASSERT_EQ(seg.points.size(), static_cast<std::size_t>(j + 1));
    }
}

TEST(BVP, SegmentIsAnOrbit) {
    const SaddleNF nf = nf_from_cross(0.5, sample_hhat(), 8);
    const SaddleMaps m = saddle_map(nf, 8);
    for (int j : {3, 12, 30}) {
        const auto seg = bvp_iterate(nf, 0.1, 0.1, j);
        EXPECT_EQ(seg.points.front().x, 0.1);
        EXPECT_EQ(seg.points.back().y, 0.1);
        double step_err = 0.0;
        for (int s = 0; s < j; ++s)
            step_err = std::max(step_err, norm_inf(evaluate(m.explicit_form, seg.points[s]) - seg.points[s + 1]));
        EXPECT_LT(step_err, 1e-12);
        // direct iteration from (x0, y0) reaches (xj, yj)
        Point2 z{seg.x0, seg.y0};
        for (int s = 0; s < j; ++s) z = evaluate(m.explicit_form, z);
        EXPECT_NEAR(z.x, seg.xj, 1e-9);
        EXPECT_NEAR(z.y, 0.1, 1e-9);
    }
}

TEST(BVP, SweepsContract) {
    const SaddleNF nf = nf_from_cross(0.5, sample_hhat(), 8);
    for (int j : {5, 10, 20}) {
        const auto seg = bvp_iterate(nf, 0.12, -0.12, j);
        for (std::size_t i = 1; i < seg.sweep_changes.size(); ++i)
            EXPECT_LT(seg.sweep_changes[i], 0.9 * seg.sweep_changes[i - 1]);
    }
}

TEST(BVP, NoContractionOutsideDomain) {
    Series2 hh(0);
    hh.at(0, 0) = 40.0;
    const SaddleNF nf = nf_from_cross(0.9, hh, 3);
    BVPOptions opt;
    opt.delta0 = 10.0;
    opt.max_sweeps = 30;
    EXPECT_THROW(bvp_iterate(nf, 2.0, 2.0, 40, opt), NoContraction);
    EXPECT_THROW(bvp_iterate(nf, 2.0, 2.0, 40), OutOfDomain);
}

// x_s y_s stays near lambda^j x0 yj along the segment, so
// x_j - lambda^j x0 -> h1(0) j lambda^{2j} x0^2 yj
TEST(BVP, EndpointCorrectionHasJLambdaSquaredShape) {
    for (double lam : {0.5, 0.8}) {
        const SaddleNF nf = nf_from_cross(lam, sample_hhat(), 8);
        const double x0 = 0.1, yj = 0.1;
        const double c = nf.h1.coeff(0, 0) * x0 * x0 * yj;
        std::vector<double> lj, ld;
        for (int j = 10; j <= 40; j += 5) {
            const auto seg = bvp_iterate(nf, x0, yj, j);
            const double model = j * std::pow(lam, 2 * j);
            const double d = seg.xj - std::pow(lam, j) * x0;
            lj.push_back(std::log(model));
            ld.push_back(std::log(std::abs(d)));
            if (j >= 30) EXPECT_NEAR(d / model / c, 1.0, 0.05) << "lambda " << lam << " j " << j;
        }
        // least-squares slope of log|d| against log(j lambda^{2j})
        double mx = 0, my = 0;
        for (std::size_t i = 0; i < lj.size(); ++i) mx += lj[i], my += ld[i];
        mx /= lj.size();
        my /= ld.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < lj.size(); ++i) {
            sxy += (lj[i] - mx) * (ld[i] - my);
            sxx += (lj[i] - mx) * (lj[i] - mx);
        }
        EXPECT_NEAR(sxy / sxx, 1.0, 0.1) << "lambda " << lam;
    }
}

TEST(Reduction, NormalFormInputGivesIdentityChange) {
    const int D = 6;
    const SaddleNF nf = nf_from_cross(0.5, sample_hhat(), D - 3);
    const auto rep = reduce_to_main_nf(nf_polynomial(nf, D), D);
    const PolyMap2 I = PolyMap2::identity(D);
    EXPECT_LT((rep.change.fx - I.fx).max_abs(), 1e-12);
    EXPECT_LT((rep.change.fy - I.fy).max_abs(), 1e-12);
    EXPECT_LT(rep.residual, 1e-12);
    EXPECT_LT((rep.nf.h1 - nf.h1).max_abs(), 1e-12);
}

// property: random L-reversible polynomial saddles reduce to the main form with
// h1(0) = -h2(0), straight axes and no x y^k term in xbar
TEST(ReductionProperty, RandomReversibleSaddles) {
    Gen g(44);
    for (int trial = 0; trial < 25; ++trial) {
        const int D = g.integer(4, 6);
        double a = 0.0;
        std::vector<double> p;
        // the linear part has det 1 and trace a + (1 - p1^2) / a; keep it a saddle
        do {
            a = g.uniform(0.3, 0.8) * (g.coin() ? 1 : -1);
            p = {g.uniform(-0.5, 0.5), g.uniform(-0.5, 0.5), g.uniform(-0.5, 0.5)};
        } while (std::abs(a + (1.0 - p[0] * p[0]) / a) < 2.2);
        std::vector<double> q{g.uniform(-0.5, 0.5)};
        const PolyMap2 F = reversible_polynomial_saddle(a, p, q, D);
        const auto rep = reduce_to_main_nf(F, D);
        EXPECT_NEAR(rep.nf.h1.coeff(0, 0), -rep.nf.h2.coeff(0, 0), 1e-9) << "trial " << trial;
        EXPECT_LT(rep.residual, 1e-9);
        EXPECT_LT(rep.change_symmetry_defect, 1e-9);
        const Mat2 A = F.jac({0, 0});
        const double lam = rep.nf.lambda;
        EXPECT_LT(std::abs(lam), 1.0);
        EXPECT_NEAR(lam * lam - A.trace() * lam + A.determinant(), 0.0, 1e-12);
        for (int k = 0; k <= D; ++k) {
            EXPECT_NEAR(rep.normal_form.fx.coeff(0, k), 0.0, 1e-9);
            EXPECT_NEAR(rep.normal_form.fy.coeff(k, 0), 0.0, 1e-9);
            if (k >= 1) EXPECT_NEAR(rep.normal_form.fx.coeff(1, k), 0.0, 1e-9);
        }
        // conjugacy: F o change = change o NF through degree D
        const PolyMap2 lhs = F.compose(rep.change), rhs = rep.change.compose(rep.normal_form);
        EXPECT_LT((lhs.fx - rhs.fx).max_abs(), 1e-9);
        EXPECT_LT((lhs.fy - rhs.fy).max_abs(), 1e-9);
    }
}

TEST(Reduction, FromPlanarMapByFitting) {
    const PolyMap2 F = reversible_polynomial_saddle(0.6, {0.3, -0.2, 0.1}, {0.4}, 4);
    const auto rep = reduce_to_main_nf(F.planar(), 4);
    EXPECT_NEAR(rep.nf.h1.coeff(0, 0), -rep.nf.h2.coeff(0, 0), 1e-9);
    EXPECT_LT(rep.residual, 1e-9);
}

TEST(Reduction, RejectsBadInput) {
    const int D = 4;
    const Series2 x = Series2::x(D), y = Series2::y(D);
    EXPECT_THROW(reduce_to_main_nf(PolyMap2{x * 0.5 + x.mul(y), y * 2.0}, D), NonReversibleInput);
    // a rotation is reversible under L but has no saddle
    EXPECT_THROW(reduce_to_main_nf(PolyMap2{y, x * -1.0}, D), NotSaddleOnFixLine);
    PolyMap2 shifted{x * 0.5 + Series2::constant(D, 0.1), y * 2.0 + Series2::constant(D, 0.1)};
    EXPECT_THROW(reduce_to_main_nf(shifted, D), NotSaddleOnFixLine);
}
