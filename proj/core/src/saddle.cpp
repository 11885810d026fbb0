// SPDX-License-Identifier: Apache-2.0
#include "revmap/saddle.hpp"
#include "revmap/errors.hpp"

#include <algorithm>
#include <cmath>

namespace revmap {

Mat2 PolyMap2::jac(const Point2& p) const {
    Mat2 J;
    J << fx.dx(p.x, p.y), fx.dy(p.x, p.y), fy.dx(p.x, p.y), fy.dy(p.x, p.y);
    return J;
}

PolyMap2 PolyMap2::compose(const PolyMap2& in) const {
    return {fx.compose(in.fx, in.fy), fy.compose(in.fx, in.fy)};
}

PlanarMap PolyMap2::planar() const {
    PolyMap2 self = *this;
    return PlanarMap::explicit_map([self](const Point2& p) { return self(p); },
                                   [self](const Point2& p) { return self.jac(p); });
}

namespace {

Series2 linear(int d, double a, double b) {
    Series2 s(d);
    if (d >= 1) {
        s.at(1, 0) = a;
        s.at(0, 1) = b;
    }
    return s;
}

Mat2 linear_part(const PolyMap2& F) {
    Mat2 A;
    A << F.fx.coeff(1, 0), F.fx.coeff(0, 1), F.fy.coeff(1, 0), F.fy.coeff(0, 1);
    return A;
}

// univariate polynomial sum_i c[i] t^(i+1), composed with a series t
Series2 poly_of(const std::vector<double>& c, const Series2& t, int d) {
    Series2 r(d), pw = Series2::constant(d, 1.0);
    for (double ci : c) {
        pw = pw.mul(t.truncated(d));
        r = r + pw * ci;
    }
    return r;
}

Series2 poly_of_even(const std::vector<double>& c, const Series2& t, int d) {
    Series2 r(d), t2 = t.truncated(d).mul(t.truncated(d)), pw = Series2::constant(d, 1.0);
    for (double ci : c) {
        pw = pw.mul(t2);
        r = r + pw * ci;
    }
    return r;
}

bool target_x(int i, int j) { return (i == 1 && j == 0) || (i >= 2 && j >= 1); }
bool target_y(int i, int j) { return (i == 0 && j == 1) || (i >= 1 && j >= 2); }

// least-squares Taylor fit of degree `deg`, coefficients through degree `keep`
PolyMap2 fit_poly(const PlanarMap& F, int keep, double h) {
    const int deg = keep + 2, R = deg / 2 + 2;
    const int nterm = (deg + 1) * (deg + 2) / 2, npts = (2 * R + 1) * (2 * R + 1);
    Eigen::MatrixXd A(npts, nterm), b(npts, 2);
    int row = 0;
    for (int i = -R; i <= R; ++i)
        for (int j = -R; j <= R; ++j, ++row) {
            int col = 0;
            for (int d = 0; d <= deg; ++d)
                for (int n = 0; n <= d; ++n, ++col)
                    A(row, col) = std::pow(double(i), d - n) * std::pow(double(j), n);
            Point2 v = evaluate(F, {i * h, j * h});
            b(row, 0) = v.x;
            b(row, 1) = v.y;
        }
    Eigen::MatrixXd sol = A.colPivHouseholderQr().solve(b);
    PolyMap2 P{Series2(keep), Series2(keep)};
    int col = 0;
    for (int d = 0; d <= deg; ++d)
        for (int n = 0; n <= d; ++n, ++col) {
            if (d > keep) continue;
            P.fx.at(d - n, n) = sol(col, 0) / std::pow(h, d);
            P.fy.at(d - n, n) = sol(col, 1) / std::pow(h, d);
        }
    return P;
}

} // namespace

PolyMap2 series_inverse(const PolyMap2& F, int d) {
    const Mat2 A = linear_part(F);
    const Mat2 Ai = A.inverse();
    PolyMap2 N{F.fx.truncated(d) - linear(d, A(0, 0), A(0, 1)),
               F.fy.truncated(d) - linear(d, A(1, 0), A(1, 1))};
    PolyMap2 G{linear(d, Ai(0, 0), Ai(0, 1)), linear(d, Ai(1, 0), Ai(1, 1))};
    for (int it = 0; it < d; ++it) {
        PolyMap2 n = N.compose(G);
        Series2 rx = Series2::x(d) - n.fx, ry = Series2::y(d) - n.fy;
        G = {rx * Ai(0, 0) + ry * Ai(0, 1), rx * Ai(1, 0) + ry * Ai(1, 1)};
    }
    return G;
}

PolyMap2 explicit_from_cross(const Series2& X, const Series2& Y, int d) {
    const double a = Y.coeff(0, 1);
    if (a == 0.0) throw DegenerateLinearPart("cross form not solvable for ybar");
    const Series2 R = Y.truncated(d) - linear(d, 0.0, a);
    const Series2 x = Series2::x(d), y = Series2::y(d);
    Series2 yb = y * (1.0 / a);
    for (int it = 0; it <= d; ++it) yb = (y - R.compose(x, yb)) * (1.0 / a);
    return {X.truncated(d).compose(x, yb), yb};
}

double series_reversibility_defect(const PolyMap2& F, int d) {
    PolyMap2 Ft = F.truncated(d);
    PolyMap2 LFL{Ft.fy.swapped(), Ft.fx.swapped()};
    PolyMap2 c = LFL.compose(Ft);
    return std::max((c.fx - Series2::x(d)).max_abs(), (c.fy - Series2::y(d)).max_abs());
}

SaddleMaps saddle_map(const SaddleNF& nf, int degree) {
    const double lam = nf.lambda, gam = 1.0 / lam;
    const int N = degree + 3;
    const Series2 x = Series2::x(N), y = Series2::y(N);
    const Series2 xy = x.mul(y);
    const Series2 h1 = nf.h1.truncated(N), h2 = nf.h2.truncated(N);

    SaddleMaps out;
    out.explicit_form = PlanarMap::explicit_map([nf, lam, gam](const Point2& p) {
        const double w = p.x * p.y;
        return Point2{lam * p.x * (1.0 + nf.h1.eval(p.x, p.y) * w),
                      gam * p.y * (1.0 + nf.h2.eval(p.x, p.y) * w)};
    });

    // variables (x, ybar): invert ybar = gam y (1 + h2 x y) for y
    const Series2 G = h2.mul(x).mul(y).mul(y) * gam; // ybar - gam y
    Series2 Y = y * lam;
    for (int it = 0; it <= N; ++it) Y = (y - G.compose(x, Y)) * lam;
    const Series2 Fx = (x + h1.mul(xy).mul(x)) * lam;
    const Series2 X = Fx.compose(x, Y);

    out.hhat_x = Series2(degree);
    out.hhat_y = Series2(degree);
    for (int i = 0; i <= degree; ++i)
        for (int j = 0; i + j <= degree; ++j) {
            out.hhat_x.at(i, j) = X.coeff(i + 2, j + 1);
            out.hhat_y.at(i, j) = Y.coeff(i + 1, j + 2);
        }
    out.cross_symmetry_defect = (out.hhat_y - out.hhat_x.swapped()).max_abs();

    Series2 hh = out.hhat_x;
    out.cross_form = PlanarMap::cross(
        [lam, hh](double x, double yb) { return lam * x + hh.eval(x, yb) * x * x * yb; },
        [lam, hh](double x, double yb) { return lam * yb + hh.eval(yb, x) * x * yb * yb; });
    out.cross_form.predictor = [lam, gam](const Point2& p) { return Point2{lam * p.x, gam * p.y}; };
    return out;
}

SaddleNF nf_from_cross(double lambda, const Series2& hhat, int degree) {
    const int N = degree + 3;
    const Series2 x = Series2::x(N), y = Series2::y(N);
    const Series2 h = hhat.truncated(N);
    const Series2 X = x * lambda + h.mul(x).mul(x).mul(y);
    const Series2 Y = y * lambda + h.swapped().mul(x).mul(y).mul(y);
    PolyMap2 F = explicit_from_cross(X, Y, N);
    SaddleNF nf;
    nf.lambda = lambda;
    nf.h1 = Series2(degree);
    nf.h2 = Series2(degree);
    for (int i = 0; i <= degree; ++i)
        for (int j = 0; i + j <= degree; ++j) {
            nf.h1.at(i, j) = F.fx.coeff(i + 2, j + 1) / lambda;
            nf.h2.at(i, j) = F.fy.coeff(i + 1, j + 2) * lambda;
        }
    return nf;
}

BVPOrbitSegment bvp_iterate(const SaddleNF& nf, double x0, double yj, int j,
                            const BVPOptions& opt) {
    if (j < 1) throw DomainError("segment length must be positive");
    if (std::abs(x0) > opt.delta0 / 2 || std::abs(yj) > opt.delta0 / 2)
        throw OutOfDomain("boundary data outside delta0 / 2");
    const double lam = nf.lambda, gam = 1.0 / lam;
    auto hh = [&](double x, double y) { return lam * nf.h1.eval(x, y) * x * x * y; };
    auto gg = [&](double x, double y) { return gam * nf.h2.eval(x, y) * x * y * y; };

    std::vector<double> xs(j + 1), ys(j + 1), nx(j + 1), ny(j + 1);
    for (int s = 0; s <= j; ++s) {
        xs[s] = std::pow(lam, s) * x0;
        ys[s] = std::pow(lam, j - s) * yj;
    }
    BVPOrbitSegment seg;
    seg.j = j;
    seg.x0 = x0;
    seg.yj = yj;
    int growing = 0;
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        nx[0] = x0;
        for (int i = 1; i <= j; ++i) nx[i] = lam * nx[i - 1] + hh(xs[i - 1], ys[i - 1]);
        ny[j] = yj;
        for (int i = j - 1; i >= 0; --i) ny[i] = lam * (ny[i + 1] - gg(xs[i], ys[i]));
        // change relative to the linear solution, so long segments keep precision
        double change = 0.0, sup = 0.0;
        for (int s = 0; s <= j; ++s) {
            const double wx = std::abs(std::pow(lam, s) * x0) + 1e-300;
            const double wy = std::abs(std::pow(lam, j - s) * yj) + 1e-300;
            change = std::max({change, std::abs(nx[s] - xs[s]) / wx, std::abs(ny[s] - ys[s]) / wy});
            sup = std::max({sup, std::abs(nx[s]), std::abs(ny[s])});
        }
        xs.swap(nx);
        ys.swap(ny);
        if (sup > opt.delta0 || !std::isfinite(change))
            throw NoContraction("iterate left the delta0 ball");
        if (!seg.sweep_changes.empty() && change > seg.sweep_changes.back())
            ++growing;
        else
            growing = 0;
        seg.sweep_changes.push_back(change);
        if (growing >= 3) throw NoContraction("successive changes grow");
        if (change < opt.tol) {
            for (int s = 0; s <= j; ++s) seg.points.push_back({xs[s], ys[s]});
            seg.xj = xs[j];
            seg.y0 = ys[0];
            return seg;
        }
    }
    throw NoContraction("no convergence within max_sweeps");
}

ReductionReport reduce_to_main_nf(const PolyMap2& Fin, int D, double rev_tol) {
    const PolyMap2 F = Fin.truncated(D);
    if (std::abs(F.fx.coeff(0, 0)) > 1e-10 || std::abs(F.fy.coeff(0, 0)) > 1e-10)
        throw NotSaddleOnFixLine("origin is not fixed");
    const double defect = series_reversibility_defect(F, D);
    if (defect > rev_tol)
        throw NonReversibleInput("L F L F - id has coefficient " + std::to_string(defect));

    const Mat2 A = linear_part(F);
    const double tr = A.trace(), det = A.determinant(), disc = tr * tr - 4 * det;
    if (disc <= 0) throw NotSaddleOnFixLine("complex multipliers");
    const double r = std::sqrt(disc);
    const double m1 = (tr - r) / 2, m2 = (tr + r) / 2;
    const double lam = std::abs(m1) < std::abs(m2) ? m1 : m2;
    const double gam = det / lam;
    if (!(std::abs(lam) < 1.0 && std::abs(gam) > 1.0))
        throw NotSaddleOnFixLine("multipliers do not straddle the unit circle");

    // eigenvector v of lam; P = [v, L v] commutes with L
    Eigen::Vector2d v(A(0, 1), lam - A(0, 0));
    if (v.norm() < 1e-12) v = Eigen::Vector2d(lam - A(1, 1), A(1, 0));
    v.normalize();
    // sign fixed so an input already in normal form gets the identity change
    if (v(std::abs(v(0)) >= std::abs(v(1)) ? 0 : 1) < 0) v = -v;
    if (std::abs(v(0) * v(0) - v(1) * v(1)) < 1e-12)
        throw NotSaddleOnFixLine("stable direction lies on Fix L");
    PolyMap2 P{linear(D, v(0), v(1)), linear(D, v(1), v(0))};
    PolyMap2 change = P;
    PolyMap2 G = series_inverse(P, D).compose(F.compose(P));

    for (int d = 2; d <= D; ++d) {
        PolyMap2 step = PolyMap2::identity(D);
        for (int i = 0; i <= d; ++i) {
            const int j = d - i;
            const double rate = std::pow(lam, i - j);
            if (!target_x(i, j)) step.fx.at(i, j) = G.fx.coeff(i, j) / (rate - lam);
            if (!target_y(i, j)) step.fy.at(i, j) = G.fy.coeff(i, j) / (rate - gam);
        }
        G = series_inverse(step, D).compose(G.compose(step));
        change = change.compose(step);
    }

    ReductionReport rep;
    rep.normal_form = G;
    rep.change = change;
    for (int i = 0; i <= D; ++i)
        for (int j = 0; i + j <= D; ++j) {
            if (!target_x(i, j)) rep.residual = std::max(rep.residual, std::abs(G.fx.coeff(i, j)));
            if (!target_y(i, j)) rep.residual = std::max(rep.residual, std::abs(G.fy.coeff(i, j)));
        }
    const int hd = std::max(0, D - 3);
    rep.nf.lambda = lam;
    rep.nf.h1 = Series2(hd);
    rep.nf.h2 = Series2(hd);
    for (int i = 0; i <= hd; ++i)
        for (int j = 0; i + j <= hd; ++j) {
            rep.nf.h1.at(i, j) = G.fx.coeff(i + 2, j + 1) / lam;
            rep.nf.h2.at(i, j) = G.fy.coeff(i + 1, j + 2) / gam;
        }
    PolyMap2 LcL{change.fy.swapped(), change.fx.swapped()};
    rep.change_symmetry_defect =
        std::max((LcL.fx - change.fx).max_abs(), (LcL.fy - change.fy).max_abs());
    return rep;
}

ReductionReport reduce_to_main_nf(const PlanarMap& F, int D, double rev_tol) {
    return reduce_to_main_nf(fit_poly(F, D, 0.05), D, rev_tol);
}

PolyMap2 reversible_polynomial_saddle(double a, const std::vector<double>& p,
                                      const std::vector<double>& q, int d) {
    const Series2 x = Series2::x(d), y = Series2::y(d);
    const Series2 yb = (y - poly_of(p, x, d)) * (1.0 / a);
    PolyMap2 F{x * a + poly_of(p, yb, d), yb};
    if (q.empty()) return F;
    PolyMap2 phi{x + poly_of_even(q, x - y, d), y + poly_of_even(q, y - x, d)};
    PolyMap2 phi_inv{x - poly_of_even(q, x - y, d), y - poly_of_even(q, y - x, d)};
    return phi_inv.compose(F.compose(phi));
}

} // namespace revmap
