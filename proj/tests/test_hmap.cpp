// SPDX-License-Identifier: Apache-2.0
#include "gen.hpp"

#include "revmap/errors.hpp"
#include "revmap/hmap.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace revmap;
using revmap::testing::Gen;

namespace {

// fixed points from the two parabolas, written out independently: the diagonal
// y = x gives x^2 + (1 - c) x - M = 0, the anti-diagonal x + y = 1 - c gives
// x^2 - s x + s^2 - M = 0 with s = 1 - c
struct Census {
    int n = 0;
    int n_sym = 0;
};

Census parabola_census(double c, double M) {
    Census k;
    const double s = 1.0 - c;
    const double dd = s * s + 4.0 * M;
    if (dd > 0) {
        k.n += 2;
        k.n_sym += 2;
    } else if (dd == 0) {
        k.n += 1;
        k.n_sym += 1;
    }
    if (4.0 * M - 3.0 * s * s > 0) k.n += 2;
    return k;
}

std::string kind_of_trace(double tr) {
    if (std::abs(tr - 2.0) < 1e-7 || std::abs(tr + 2.0) < 1e-7) return "parabolic";
    if (std::abs(tr) < 2.0) return "elliptic";
    return tr > 0 ? "saddle" : "flip_saddle";
}

} // namespace

TEST(EvalH, Examples) {
    const Point2 a = eval_H({-1, 4}, {2, 0});
    EXPECT_NEAR(a.x, 2.0, 1e-14);
    EXPECT_NEAR(a.y, 0.0, 1e-14);
    const Point2 o = eval_H({1, 0}, {0, 0});
    EXPECT_EQ(o.x, 0.0);
    EXPECT_EQ(o.y, 0.0);
}

TEST(EvalH, MatchesImplicitPairAndInverse) {
    Gen g(21);
    for (int i = 0; i < 200; ++i) {
        const HParams h = g.hparams();
        const Point2 p = g.point(2.0);
        const Point2 q = eval_H(h, p);
        // xbar = M + c x - y^2, y = M + c ybar - xbar^2
        EXPECT_NEAR(q.x, h.M_tilde + h.c_tilde * p.x - p.y * p.y, 1e-12 * (1 + std::abs(q.x)));
        EXPECT_NEAR(p.y, h.M_tilde + h.c_tilde * q.y - q.x * q.x, 1e-10 * (1 + q.x * q.x));
        const Point2 back = eval_H_inverse(h, q);
        EXPECT_LT(norm(back - p), 1e-8 * (1 + norm(q))) << "case " << i;
    }
}

TEST(EvalHProperty, UnitJacobianAndReversibility) {
    Gen g(22);
    double worst_det = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const HParams h = g.hparams(1e-3);
        worst_det = std::max(worst_det, std::abs(jac_H(h, g.point(3.0)).determinant() - 1.0));
    }
    EXPECT_LT(worst_det, 1e-10);
    for (int i = 0; i < 50; ++i) {
        const HParams h = g.hparams();
        EXPECT_LT(reversibility_residual(h_map(h), Involution::swap_xy(), g.points(5, 1.5)), 1e-9);
    }
}

TEST(HenonFactors, ComposeAndConstantJacobians) {
    Gen g(23);
    for (int i = 0; i < 100; ++i) {
        const HParams h = g.hparams();
        const auto [H1, H2] = henon_factors(h);
        const Point2 p = g.point(2.0);
        const Point2 a = eval_H(h, p), b = evaluate(H2, evaluate(H1, p));
        EXPECT_LT(norm_inf(a - b), 1e-12 * (1 + norm_inf(a)));
        EXPECT_NEAR(jacobian(H1, p).determinant(), -h.c_tilde, 1e-12 * (1 + std::abs(h.c_tilde)));
        EXPECT_NEAR(jacobian(H2, p).determinant(), -1.0 / h.c_tilde, 1e-12 / std::abs(h.c_tilde) + 1e-12);
    }
    // c = -1: each factor has det +1
    const auto [H1, H2] = henon_factors({-1.0, 0.7});
    EXPECT_NEAR(jacobian(H1, {0.3, 0.2}).determinant(), 1.0, 1e-12);
    EXPECT_NEAR(jacobian(H2, {0.3, 0.2}).determinant(), 1.0, 1e-12);
}

TEST(SymmetricFixedPoints, Examples) {
    const auto fold = symmetric_fixed_points({-1, -1});
    ASSERT_EQ(fold.size(), 1u);
    EXPECT_NEAR(fold[0].location.x, -1.0, 1e-12);
    EXPECT_EQ(fold[0].kind, FixedKind::Parabolic);

    const auto two = symmetric_fixed_points({-1, 3});
    ASSERT_EQ(two.size(), 2u);
    EXPECT_NEAR(two[0].location.x, 1.0, 1e-12);
    EXPECT_NEAR(two[1].location.x, -3.0, 1e-12);
    EXPECT_TRUE(symmetric_fixed_points({-1, -2}).empty());
}

TEST(AllFixedPoints, Examples) {
    const auto four = all_fixed_points({-1, 4});
    ASSERT_EQ(four.size(), 4u);
    EXPECT_NEAR(four[2].location.x, 2.0, 1e-12);
    EXPECT_NEAR(four[2].location.y, 0.0, 1e-12);
    EXPECT_NEAR(four[3].location.x, 0.0, 1e-12);
    EXPECT_NEAR(four[3].location.y, 2.0, 1e-12);
    EXPECT_EQ(all_fixed_points({-1, 3}).size(), 2u);

    const auto q = all_fixed_points({1.0, 0.49});
    ASSERT_EQ(q.size(), 4u);
    for (const auto& fp : q) {
        EXPECT_NEAR(std::abs(fp.location.x), 0.7, 1e-12);
        EXPECT_NEAR(std::abs(fp.location.y), 0.7, 1e-12);
    }
}

TEST(AllFixedPointsProperty, ParabolaCensusPairsAndNumericAgreement) {
    Gen g(24);
    for (int i = 0; i < 300; ++i) {
        const HParams h = g.hparams();
        const auto fps = all_fixed_points(h);
        const Census k = parabola_census(h.c_tilde, h.M_tilde);
        ASSERT_EQ(static_cast<int>(fps.size()), k.n) << h.c_tilde << " " << h.M_tilde;
        int n_sym = 0;
        for (const auto& fp : fps) {
            EXPECT_LT(norm(eval_H(h, fp.location) - fp.location), 1e-9 * (1 + norm(fp.location)));
            n_sym += fp.symmetric;
            if (!fp.symmetric) {
                // the L-image is also in the list
                bool found = false;
                for (const auto& o : fps)
                    found |= norm(o.location - Point2{fp.location.y, fp.location.x}) < 1e-12;
                EXPECT_TRUE(found);
            }
            const auto [tr, det] = trace_det(h, fp);
            EXPECT_NEAR(det, 1.0, 1e-12);
            EXPECT_EQ(kind_label(fp), kind_of_trace(tr));
        }
        EXPECT_EQ(n_sym, k.n_sym);
        const auto num = numeric_fixed_points(h);
        EXPECT_EQ(num.size(), fps.size()) << h.c_tilde << " " << h.M_tilde;
    }
}

TEST(CensusProperty, CountJumpsOnlyAcrossFoldAndPitchfork) {
    // along c = -1 the count changes at M = -1 (fold) and M = 3 (pitchfork)
    int prev = -1;
    std::vector<double> jumps;
    for (int i = 0; i <= 700; ++i) {
        const double M = -2.0 + 0.01 * i + 0.003;
        const int n = static_cast<int>(all_fixed_points({-1.0, M}).size());
        if (prev >= 0 && n != prev) jumps.push_back(M);
        prev = n;
    }
    ASSERT_EQ(jumps.size(), 2u);
    EXPECT_NEAR(jumps[0], -1.0, 0.011);
    EXPECT_NEAR(jumps[1], 3.0, 0.011);
}

TEST(BifCurve, ClosedFormsAndDomains) {
    EXPECT_NEAR(bif_curve(CurveId::F1, {-1.0})[0].M_tilde, -1.0, 1e-15);
    EXPECT_NEAR(bif_curve(CurveId::PF1p, {-1.0})[0].M_tilde, 3.0, 1e-15);
    EXPECT_THROW(bif_curve(CurveId::F1, {0.5}), DomainError);
    EXPECT_THROW(bif_curve(CurveId::PFpm, {0.5}), DomainError);
    const auto res = bif_curve(CurveId::RES14, {2.0});
    ASSERT_EQ(res.size(), 2u);
    EXPECT_NEAR(res[0].M_tilde, 1.25 + std::sqrt(5.0) / 2 * -1.0, 1e-14);
}

// property: on each curve the designated fixed point carries the designated trace
TEST(BifCurveProperty, MultiplierConditions) {
    Gen g(25);
    for (CurveId id : all_curves()) {
        const bool res = id == CurveId::RES13 || id == CurveId::RES14;
        int done = 0;
        while (done < 50) {
            const double c = g.uniform(-3.0, 3.0);
            if (std::abs(c) < 0.05 || !curve_domain_ok(id, c)) continue;
            ++done;
            for (int br : res ? std::vector<int>{1, -1} : std::vector<int>{0}) {
                const HParams h{c, curve_M(id, c, br)};
                const Point2 p = curve_point(id, c, br);
                ASSERT_LT(norm(eval_H(h, p) - p), 1e-9 * (1 + norm(p))) << to_string(id) << " c=" << c;
                EXPECT_NEAR(jac_H(h, p).trace(), curve_trace(id), 1e-7) << to_string(id) << " c=" << c;
            }
        }
    }
}

TEST(BifCurve, PD2AtMinusHalf) {
    const double c = -0.5;
    const HParams h{c, curve_M(CurveId::PD2p, c)};
    const Point2 p = curve_point(CurveId::PD2p, c);
    const Eigen::EigenSolver<Mat2> es(jac_H(h, p));
    double closest = 1e9;
    for (int i = 0; i < 2; ++i) closest = std::min(closest, std::abs(es.eigenvalues()[i] + 1.0));
    EXPECT_LT(closest, 1e-8);
}

TEST(ClassifyRegion, KnownPoints) {
    const auto none = classify_region({-1, -2});
    EXPECT_EQ(none.label, "I_l");
    EXPECT_EQ(none.n_fixed, 0);

    const auto two = classify_region({-1, 1});
    ASSERT_EQ(two.n_fixed, 2);
    EXPECT_EQ(two.kinds[0], "elliptic");
    EXPECT_TRUE(two.kinds[1] == "saddle" || two.kinds[1] == "flip_saddle");
    EXPECT_TRUE(two.matches_prediction);

    // (-1, 4) sits on PDp34; just above the pitchfork the asymmetric pair is elliptic
    EXPECT_THROW(classify_region({-1, 4}), OnCurve);
    const auto four = classify_region({-1, 3.5});
    ASSERT_EQ(four.n_fixed, 4);
    EXPECT_EQ(four.kinds[2], "elliptic");
    EXPECT_EQ(four.kinds[3], "elliptic");
    EXPECT_EQ(four.label, "VI_l");

    EXPECT_THROW(classify_region({0.0, 1.0}), DomainError);
    EXPECT_THROW(classify_region({-1, -1}), OnCurve);
}

TEST(ClassifyRegionProperty, NumericCensusMatchesCurves) {
    Gen g(26);
    std::map<std::string, int> seen;
    for (int i = 0; i < 200; ++i) {
        const HParams h = g.hparams();
        RegionResult r;
        try {
            r = classify_region(h);
        } catch (const OnCurve&) {
            continue;
        }
        EXPECT_TRUE(r.matches_prediction) << h.c_tilde << " " << h.M_tilde;
        const double s = h.c_tilde - 1.0;
        const int expect = (h.M_tilde > -0.25 * s * s ? 2 : 0) + (h.M_tilde > 0.75 * s * s ? 2 : 0);
        EXPECT_EQ(r.n_fixed, expect) << h.c_tilde << " " << h.M_tilde;
        ++seen[r.label];
    }
    EXPECT_GE(seen.size(), 8u);
    EXPECT_EQ(seen.count("unlabeled"), 0u);
}
