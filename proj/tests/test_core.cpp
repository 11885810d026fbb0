// SPDX-License-Identifier: Apache-2.0
#include "gen.hpp"

#include "revmap/core.hpp"
#include "revmap/errors.hpp"
#include "revmap/hmap.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>

using namespace revmap;
using revmap::testing::Gen;

namespace {

PlanarMap linear_saddle(double lam) {
    return PlanarMap::explicit_map([lam](const Point2& p) { return Point2{lam * p.x, p.y / lam}; });
}

// xbar = a x + p(ybar), y = a ybar + p(x): polynomial with a polynomial inverse
PlanarMap poly_cross(double a, std::vector<double> coeffs) {
    auto pv = [coeffs](double v) {
        double s = 0.0, pw = v;
        for (double c : coeffs) {
            s += c * pw;
            pw *= v;
        }
        return s;
    };
    return PlanarMap::explicit_map([a, pv](const Point2& z) {
        const double yb = (z.y - pv(z.x)) / a;
        return Point2{a * z.x + pv(yb), yb};
    });
}

} // namespace

TEST(Evaluate, LinearSaddleExplicitAndCross) {
    const Point2 e = evaluate(linear_saddle(0.5), {1, 1});
    EXPECT_DOUBLE_EQ(e.x, 0.5);
    EXPECT_DOUBLE_EQ(e.y, 2.0);

    const auto cross = PlanarMap::cross([](double x, double) { return 0.5 * x; },
                                        [](double, double yb) { return 0.5 * yb; });
    const Point2 c = evaluate(cross, {1, 1});
    EXPECT_NEAR(c.x, 0.5, 1e-14);
    EXPECT_NEAR(c.y, 2.0, 1e-12);
}

TEST(Evaluate, ImplicitHFixesAsymmetricPoint) {
    const Point2 z = evaluate(h_map_implicit({-1.0, 4.0}), {2.0, 0.0});
    EXPECT_NEAR(z.x, 2.0, 1e-12);
    EXPECT_NEAR(z.y, 0.0, 1e-12);
}

TEST(Evaluate, DomainHintIsEnforced) {
    auto m = PlanarMap::explicit_map([](const Point2& p) { return p; }, {}, Rect{-1, 1, -1, 1});
    EXPECT_THROW(evaluate(m, {2.0, 0.0}), OutOfDomain);
}

TEST(Evaluate, CrossSolveFailureIsReported) {
    // y = ybar^2 + 1 has no real solution for y = 0
    const auto bad = PlanarMap::cross([](double x, double) { return x; },
                                      [](double, double yb) { return yb * yb + 1.0; });
    EXPECT_THROW(evaluate(bad, {0.0, 0.0}), NoConvergence);
}

TEST(Jacobian, LinearSaddle) {
    const Mat2 J = jacobian(linear_saddle(0.5), {0.3, -0.7});
    EXPECT_NEAR(J(0, 0), 0.5, 1e-10);
    EXPECT_NEAR(J(1, 1), 2.0, 1e-10);
    EXPECT_NEAR(J(0, 1), 0.0, 1e-10);
    EXPECT_NEAR(J(1, 0), 0.0, 1e-10);
}

TEST(Jacobian, ImplicitAgreesWithExplicit) {
    Gen g(11);
    for (int i = 0; i < 20; ++i) {
        const HParams h{-1.0, g.uniform(-1.0, 4.0)};
        const Point2 p = g.point(1.5);
        const Mat2 a = jacobian(h_map(h, false), p);
        const Mat2 b = jacobian(h_map_implicit(h), p);
        EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-8) << "case " << i;
    }
}

TEST(Reversibility, CrossFormIsReversible) {
    const auto F = PlanarMap::cross_reversible([](double u, double v) { return 0.5 * u + 0.1 * u * v * v; });
    Gen g(12);
    EXPECT_LT(reversibility_residual(F, Involution::swap_xy(), g.points(100, 0.5)), 1e-9);
}

TEST(Reversibility, DetectsNonReversibleMap) {
    const auto F = PlanarMap::explicit_map([](const Point2& p) { return Point2{0.5 * p.x, 3.0 * p.y}; });
    EXPECT_GT(reversibility_residual(F, Involution::swap_xy(), {{0.4, 0.7}}), 0.1);
}

TEST(Reversibility, ImplicitPairIsReversible) {
    const auto F = PlanarMap::implicit_reversible(
        [](double x, double y, double xb, double) { return xb - 0.3 * x - y * y; });
    Gen g(13);
    EXPECT_LT(reversibility_residual(F, Involution::swap_xy(), g.points(50, 0.3)), 1e-9);
}

TEST(Involutions, SquareToIdentity) {
    Gen g(14);
    const auto pts = g.points(100, 3.0);
    for (const auto& R : {Involution::swap_xy(), Involution::flip_y(), Involution::negate()})
        EXPECT_EQ(involution_residual(R, pts), 0.0) << R.label;
}

TEST(Bochner, LinearInvolution) {
    const auto psi = bochner_conjugacy(Involution::swap_xy(), {0, 0});
    const Point2 q = evaluate(psi, {0.3, -1.1});
    EXPECT_DOUBLE_EQ(q.x, -2.2);
    EXPECT_DOUBLE_EQ(q.y, 0.6);
}

TEST(Bochner, NonlinearInvolutionFromConjugacy) {
    // R = phi L phi^-1, phi(x, y) = (x, y + x^2)
    auto phi = [](const Point2& p) { return Point2{p.x, p.y + p.x * p.x}; };
    auto phi_inv = [](const Point2& p) { return Point2{p.x, p.y - p.x * p.x}; };
    Involution R{[=](const Point2& p) {
                     const Point2 q = phi_inv(p);
                     return phi({q.y, q.x});
                 },
                 {}, "phi L phi^-1"};
    Gen g(15);
    const auto pts = g.points(50, 0.2);
    ASSERT_LT(involution_residual(R, pts), 1e-12);
    const auto psi = bochner_conjugacy(R, {0, 0});
    const Mat2 A = fd_jacobian(R.apply, {0, 0});
    EXPECT_LT(conjugacy_residual(psi, R, A, pts), 1e-9);
    EXPECT_LT((jacobian(psi, {0, 0}) - 2.0 * A).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Bochner, OrientationReversingLinearPart) {
    const auto psi = bochner_conjugacy(Involution::flip_y(), {0.7, 0.0});
    const Mat2 D = jacobian(psi, {0.7, 0.0});
    EXPECT_NEAR(D(0, 0), 2.0, 1e-12);
    EXPECT_NEAR(D(1, 1), -2.0, 1e-12);
}

TEST(Bochner, DegenerateLinearPartThrows) {
    Involution R{[](const Point2& p) { return p; }, [](const Point2&) { return Mat2::Zero().eval(); }, "bad"};
    EXPECT_THROW(bochner_conjugacy(R, {0, 0}), DegenerateLinearPart);
}

TEST(Area, HenonProductAndFactor) {
    Gen g(16);
    const auto pts = g.points(1000, 2.0);
    EXPECT_LT(area_preservation_residual(h_map({2.0, 1.0}), pts), 1e-10);
    const auto [H1, H2] = henon_factors({2.0, 1.0});
    for (const auto& p : g.points(100, 2.0)) {
        EXPECT_NEAR(jacobian(H1, p).determinant(), -2.0, 1e-12);
        EXPECT_NEAR(jacobian(H2, p).determinant(), -0.5, 1e-12);
    }
}

// property: any truncation of a polynomial cross-form map stays reversible and
// area preserving
TEST(AreaProperty, PolynomialCrossFormTruncations) {
    Gen g(17);
    for (int trial = 0; trial < 40; ++trial) {
        const double a = g.uniform(0.3, 0.9) * (g.coin() ? 1 : -1);
        const int degree = g.integer(2, 5);
        std::vector<double> p;
        for (int k = 0; k < degree; ++k) p.push_back(g.uniform(-0.5, 0.5));
        const auto F = poly_cross(a, p);
        const auto pts = g.points(20, 0.4);
        EXPECT_LT(area_preservation_residual(F, pts), 1e-10) << "trial " << trial << " degree " << degree;
        EXPECT_LT(reversibility_residual(F, Involution::swap_xy(), pts), 1e-8) << "trial " << trial;
    }
}

TEST(FixedPoints, HCensusExamples) {
    const Grid grid{{-6, 6, -6, 6}, 12, 12};
    const Involution L = Involution::swap_xy();
    EXPECT_TRUE(find_fixed_points(h_map({-1, -2}), grid, 1e-12, &L).empty());

    const auto two = find_fixed_points(h_map({-1, 3}), grid, 1e-12, &L);
    // the pair at the cubic tangency value may resolve as one degenerate root
    std::vector<double> diag;
    for (const auto& r : two)
        if (r.symmetric) diag.push_back(r.location.x);
    std::sort(diag.begin(), diag.end());
    ASSERT_EQ(diag.size(), 2u);
    EXPECT_NEAR(diag[0], -3.0, 1e-9);
    EXPECT_NEAR(diag[1], 1.0, 1e-9);

    const auto four = find_fixed_points(h_map({-1, 4}), grid, 1e-12, &L);
    ASSERT_EQ(four.size(), 4u);
    int asym = 0;
    for (const auto& r : four) {
        if (r.symmetric) {
            EXPECT_NEAR(std::abs(r.location.x + 1.0), std::sqrt(5.0), 1e-9);
        } else {
            ++asym;
            EXPECT_NEAR(r.location.x + r.location.y, 2.0, 1e-9);
            EXPECT_NEAR(r.location.x * r.location.y, 0.0, 1e-9);
        }
    }
    EXPECT_EQ(asym, 2);
}

TEST(FixedPoints, RecordInvariants) {
    Gen g(18);
    for (int i = 0; i < 30; ++i) {
        const HParams h = g.hparams();
        for (const auto& r : numeric_fixed_points(h)) {
            const auto prod = r.multipliers[0] * r.multipliers[1];
            EXPECT_NEAR(prod.real(), r.jac_det, 1e-9);
            EXPECT_NEAR(prod.imag(), 0.0, 1e-9);
        }
    }
}

TEST(ParallelFor, EveryIndexOnceAndExceptionsPropagate) {
    std::vector<int> hits(1000, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) EXPECT_EQ(h, 1);
    std::atomic<int> count{0};
    EXPECT_THROW(parallel_for(100, 3,
                              [&](std::size_t i) {
                                  ++count;
                                  if (i == 17) throw NoConvergence("test");
                              }),
                 NoConvergence);
}
