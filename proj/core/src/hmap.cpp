// SPDX-License-Identifier: Apache-2.0
#include "revmap/hmap.hpp"
#include "revmap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace revmap {

Point2 eval_H(const HParams& h, const Point2& p) {
    const double c = h.c_tilde, M = h.M_tilde;
    const double xb = M + c * p.x - p.y * p.y;
    return {xb, (-M + p.y + xb * xb) / c};
}

Point2 eval_H_inverse(const HParams& h, const Point2& q) {
    const double c = h.c_tilde, M = h.M_tilde;
    const double y = c * q.y + M - q.x * q.x;
    return {(q.x - M + y * y) / c, y};
}

Mat2 jac_H(const HParams& h, const Point2& p) {
    const double c = h.c_tilde;
    const double xb = h.M_tilde + c * p.x - p.y * p.y;
    Mat2 J;
    J << c, -2.0 * p.y, 2.0 * xb, (1.0 - 4.0 * xb * p.y) / c;
    return J;
}

PlanarMap h_map(const HParams& h, bool analytic_jac) {
    JacFn j;
    if (analytic_jac) j = [h](const Point2& p) { return jac_H(h, p); };
    return PlanarMap::explicit_map([h](const Point2& p) { return eval_H(h, p); }, j);
}

PlanarMap h_map_implicit(const HParams& h) {
    const double c = h.c_tilde, M = h.M_tilde;
    auto g = [c, M](double x, double y, double xb, double) { return xb - M - c * x + y * y; };
    PlanarMap m = PlanarMap::implicit_reversible(g);
    m.predictor = [h](const Point2& p) { return eval_H(h, p); };
    return m;
}

std::pair<PlanarMap, PlanarMap> henon_factors(const HParams& h) {
    const double c = h.c_tilde, M = h.M_tilde;
    auto h1 = PlanarMap::explicit_map(
        [c, M](const Point2& p) { return Point2{p.y, M + c * p.x - p.y * p.y}; },
        [c](const Point2& p) { return (Mat2() << 0, 1, c, -2 * p.y).finished(); });
    auto h2 = PlanarMap::explicit_map(
        [c, M](const Point2& p) { return Point2{p.y, (-M + p.x + p.y * p.y) / c}; },
        [c](const Point2& p) { return (Mat2() << 0, 1, 1 / c, 2 * p.y / c).finished(); });
    return {h1, h2};
}

namespace {

FixedPointRecord make_record(const HParams& h, const Point2& z) {
    FixedPointRecord r = classify(z, jac_H(h, z));
    r.symmetric = std::abs(z.x - z.y) < kSymmetryTol * (1.0 + norm(z));
    return r;
}

void sort_census(std::vector<FixedPointRecord>& v) {
    std::stable_sort(v.begin(), v.end(), [](const FixedPointRecord& a, const FixedPointRecord& b) {
        if (a.symmetric != b.symmetric) return a.symmetric;
        return a.location.x > b.location.x;
    });
}

} // namespace

std::vector<FixedPointRecord> symmetric_fixed_points(const HParams& h) {
    const double s = h.c_tilde - 1.0;
    const double D = s * s + 4.0 * h.M_tilde;
    std::vector<FixedPointRecord> out;
    if (D < 0.0) return out;
    if (D == 0.0) {
        out.push_back(make_record(h, {s / 2, s / 2}));
        return out;
    }
    const double r = std::sqrt(D);
    for (double p : {(s + r) / 2, (s - r) / 2}) out.push_back(make_record(h, {p, p}));
    return out;
}

std::vector<FixedPointRecord> all_fixed_points(const HParams& h) {
    const double c = h.c_tilde, M = h.M_tilde;
    std::vector<FixedPointRecord> out;
    if (c == 1.0) {
        // the two parabolas degenerate into M = x^2, M = y^2
        if (M < 0.0) return out;
        const double r = std::sqrt(M);
        if (r == 0.0) {
            out.push_back(make_record(h, {0, 0}));
            return out;
        }
        for (Point2 z : {Point2{r, r}, Point2{-r, -r}, Point2{r, -r}, Point2{-r, r}})
            out.push_back(make_record(h, z));
        sort_census(out);
        return out;
    }
    out = symmetric_fixed_points(h);
    const double s = 1.0 - c;
    const double D = 4.0 * M - 3.0 * s * s;
    if (D > 0.0) {
        const double r = std::sqrt(D);
        for (double x : {(s + r) / 2, (s - r) / 2}) out.push_back(make_record(h, {x, s - x}));
    }
    sort_census(out);
    return out;
}

std::string kind_label(const FixedPointRecord& fp) {
    switch (fp.kind) {
    case FixedKind::Saddle: return fp.trace() < 0 ? "flip_saddle" : "saddle";
    default: return to_string(fp.kind);
    }
}

std::pair<double, double> trace_det(const HParams& h, const FixedPointRecord& fp) {
    const double c = h.c_tilde;
    const double xy = fp.location.x * fp.location.y;
    return {c + (1.0 - 4.0 * xy) / c, 1.0};
}

std::string to_string(CurveId id) {
    switch (id) {
    case CurveId::F1: return "F1";
    case CurveId::F2: return "F2";
    case CurveId::PD1p: return "PD1p";
    case CurveId::PD2p: return "PD2p";
    case CurveId::PF1p: return "PF1p";
    case CurveId::PDp34: return "PDp34";
    case CurveId::PF2p: return "PF2p";
    case CurveId::PD3p: return "PD3p";
    case CurveId::PFpm: return "PFpm";
    case CurveId::PDpm: return "PDpm";
    case CurveId::RES13: return "RES13";
    case CurveId::RES14: return "RES14";
    }
    return "?";
}

std::vector<CurveId> all_curves() {
    return {CurveId::F1,   CurveId::F2,   CurveId::PD1p, CurveId::PD2p,  CurveId::PF1p,  CurveId::PDp34,
            CurveId::PF2p, CurveId::PD3p, CurveId::PFpm, CurveId::PDpm, CurveId::RES13, CurveId::RES14};
}

bool curve_domain_ok(CurveId id, double c) {
    switch (id) {
    case CurveId::F1:
    case CurveId::PD1p:
    case CurveId::PD2p:
    case CurveId::PF1p:
    case CurveId::PDp34: return c < 0.0;
    case CurveId::F2:
    case CurveId::PD3p:
    case CurveId::PDpm: return c > 0.0;
    case CurveId::PF2p: return c > 0.0 && c < 1.0;
    case CurveId::PFpm: return c > 1.0;
    case CurveId::RES13:
    case CurveId::RES14: return c != 0.0;
    }
    return false;
}

double curve_M(CurveId id, double c, int branch) {
    const double s = c - 1.0;
    switch (id) {
    case CurveId::F1:
    case CurveId::F2: return -0.25 * s * s;
    case CurveId::PF1p:
    case CurveId::PF2p:
    case CurveId::PFpm: return 0.75 * s * s;
    case CurveId::PD1p:
    case CurveId::PD3p: return 1.0 - 0.25 * s * s;
    case CurveId::PD2p:
    case CurveId::PDpm: return (c + 1.0) * (3.0 * c - 1.0) / 4.0;
    case CurveId::PDp34: return (1.0 - 3.0 * c) * (3.0 - c) / 4.0;
    case CurveId::RES14: {
        const double q = std::sqrt(c * c + 1.0);
        return (c * c + 1.0) / 4.0 + (branch >= 0 ? 1.0 : -1.0) * (q / 2.0) * (1.0 - c);
    }
    case CurveId::RES13: {
        const double q = std::sqrt(c * c + c + 1.0);
        return (c * c + c + 1.0) / 4.0 + (branch >= 0 ? 1.0 : -1.0) * (q / 2.0) * (1.0 - c);
    }
    }
    return 0.0;
}

double curve_trace(CurveId id) {
    switch (id) {
    case CurveId::F1:
    case CurveId::F2:
    case CurveId::PF1p:
    case CurveId::PF2p:
    case CurveId::PFpm: return 2.0;
    case CurveId::RES14: return 0.0;
    case CurveId::RES13: return -1.0;
    default: return -2.0;
    }
}

Point2 curve_point(CurveId id, double c, int branch) {
    const double sgn = branch >= 0 ? 1.0 : -1.0;
    double p = 0.0;
    switch (id) {
    case CurveId::F1:
    case CurveId::F2: p = (c - 1.0) / 2.0; break;
    case CurveId::PF1p:
    case CurveId::PF2p:
    case CurveId::PFpm: p = (1.0 - c) / 2.0; break;
    case CurveId::PD1p:
    case CurveId::PD3p: p = (c + 1.0) / 2.0; break;
    case CurveId::PD2p:
    case CurveId::PDpm: p = -(c + 1.0) / 2.0; break;
    case CurveId::RES14: p = sgn * std::sqrt(c * c + 1.0) / 2.0; break;
    case CurveId::RES13: p = sgn * std::sqrt(c * c + c + 1.0) / 2.0; break;
    case CurveId::PDp34: {
        const double s = 1.0 - c, M = curve_M(id, c);
        const double x = (s + std::sqrt(std::max(0.0, 4.0 * M - 3.0 * s * s))) / 2.0;
        return {x, s - x};
    }
    }
    return {p, p};
}

std::vector<BifCurveSample> bif_curve(CurveId id, const std::vector<double>& c_grid) {
    std::vector<BifCurveSample> out;
    for (double c : c_grid) {
        if (!curve_domain_ok(id, c))
            throw DomainError(to_string(id) + " undefined at c_tilde = " + std::to_string(c));
        if (id == CurveId::RES13 || id == CurveId::RES14) {
            out.push_back({id, c, curve_M(id, c, +1), +1});
            out.push_back({id, c, curve_M(id, c, -1), -1});
        } else {
            out.push_back({id, c, curve_M(id, c), 0});
        }
    }
    return out;
}

std::vector<FixedPointRecord> numeric_fixed_points(const HParams& h, double tol) {
    const double s = 1.0 - h.c_tilde;
    const double R = std::abs(s) + std::sqrt(std::abs(h.M_tilde) + s * s) + 1.0;
    Grid g{{-R, R, -R, R}, 12, 12};
    PlanarMap m = h_map(h);
    Involution L = Involution::swap_xy();
    auto v = find_fixed_points(m, g, tol, &L);
    sort_census(v);
    return v;
}

namespace {

std::string label_left(const HParams& h, const std::vector<FixedPointRecord>& pts,
                       const std::vector<std::string>& k) {
    const double c = h.c_tilde;
    if (pts.empty()) return "I_l";
    if (pts.size() == 2) {
        if (k[0] == "elliptic") return pts[0].location.x < 0 ? "II_l" : "V_l";
        if (k[0] == "flip_saddle") return c < -1.0 ? "III_l" : "IV_l";
    }
    if (pts.size() == 4) {
        if (k[2] == "elliptic") return "VI_l";
        if (k[2] == "flip_saddle") return "VII_l";
    }
    return "unlabeled";
}

std::string label_right(const std::vector<FixedPointRecord>& pts,
                        const std::vector<std::string>& k) {
    if (pts.empty()) return "I_r";
    const bool ep = k[0] == "elliptic", em = k.size() > 1 && k[1] == "elliptic";
    if (pts.size() == 2) {
        if (ep) return "IV_r";
        if (em && k[0] == "saddle") return "II_r";
        if (k[0] == "saddle" && k[1] == "flip_saddle") return "III_r";
        if (k[0] == "flip_saddle" && k[1] == "saddle") return "IX_r";
    }
    if (pts.size() == 4) {
        if (ep && em) return "V_r";
        if (ep && k[1] == "flip_saddle") return "VI_r";
        if (em && k[0] == "flip_saddle") return "VIII_r";
        if (!ep && !em) return "VII_r";
    }
    return "unlabeled";
}

} // namespace

RegionResult classify_region(const HParams& h) {
    const double c = h.c_tilde, M = h.M_tilde;
    if (c == 0.0) throw DomainError("c_tilde = 0 is singular");
    for (CurveId id : all_curves()) {
        if (id == CurveId::RES13 || id == CurveId::RES14 || !curve_domain_ok(id, c)) continue;
        if (std::abs(M - curve_M(id, c)) < kCurveTol)
            throw OnCurve(to_string(id) + " at c_tilde = " + std::to_string(c));
    }
    if (c == 1.0 && std::abs(M) < kCurveTol) throw OnCurve("Q* = (1, 0)");

    RegionResult r;
    r.points = numeric_fixed_points(h);
    r.n_fixed = static_cast<int>(r.points.size());
    for (const auto& fp : r.points) {
        r.n_symmetric += fp.symmetric ? 1 : 0;
        r.kinds.push_back(kind_label(fp));
    }
    r.label = c < 0 ? label_left(h, r.points, r.kinds) : label_right(r.points, r.kinds);

    auto pred = all_fixed_points(h);
    r.matches_prediction = pred.size() == r.points.size();
    for (std::size_t i = 0; r.matches_prediction && i < pred.size(); ++i) {
        r.matches_prediction = norm(pred[i].location - r.points[i].location) < 1e-7 &&
                               pred[i].symmetric == r.points[i].symmetric &&
                               kind_label(pred[i]) == r.kinds[i];
    }
    return r;
}

} // namespace revmap
