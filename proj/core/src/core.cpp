// SPDX-License-Identifier: Apache-2.0
#include "revmap/core.hpp"
#include "revmap/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace revmap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Point2 safe_call(const MapFn& F, const Point2& z) {
    try {
        Point2 r = F(z);
        if (r.finite()) return r;
    } catch (const Error&) {
    }
    return {kInf, kInf};
}

// second-order central differences, used inside Newton only
Mat2 fd2(const MapFn& F, const Point2& z, double h) {
    Mat2 J;
    Point2 fxp = F({z.x + h, z.y}), fxm = F({z.x - h, z.y});
    Point2 fyp = F({z.x, z.y + h}), fym = F({z.x, z.y - h});
    J << (fxp.x - fxm.x) / (2 * h), (fyp.x - fym.x) / (2 * h),
         (fxp.y - fxm.y) / (2 * h), (fyp.y - fym.y) / (2 * h);
    return J;
}

double default_step(const Point2& p) { return 1e-5 * (1.0 + norm(p)); }

// 4th-order central partials of a residual G(p, z), with respect to z (A) and p (B)
void residual_partials(const ResidualFn& G, const Point2& p, const Point2& z, double h, Mat2& A,
                       Mat2& B) {
    auto d = [&](auto&& g, const Point2& e) {
        Point2 f2 = g(e * 2.0), f1 = g(e), m1 = g(e * -1.0), m2 = g(e * -2.0);
        return (m2 - f2 + (f1 - m1) * 8.0) * (1.0 / (12.0 * h));
    };
    auto gz = [&](const Point2& e) { return G(p, z + e); };
    auto gp = [&](const Point2& e) { return G(p + e, z); };
    Point2 a0 = d(gz, {h, 0}), a1 = d(gz, {0, h});
    Point2 b0 = d(gp, {h, 0}), b1 = d(gp, {0, h});
    A << a0.x, a1.x, a0.y, a1.y;
    B << b0.x, b1.x, b0.y, b1.y;
}

ResidualFn cross_residual(const PlanarMap& m) {
    return [X = m.cross_x, Y = m.cross_y](const Point2& p, const Point2& z) {
        return Point2{z.x - X(p.x, z.y), p.y - Y(p.x, z.y)};
    };
}

} // namespace

PlanarMap PlanarMap::explicit_map(MapFn f, JacFn j, std::optional<Rect> dom) {
    PlanarMap m;
    m.form = MapForm::Explicit;
    m.fwd = std::move(f);
    m.jac = std::move(j);
    m.domain = dom;
    return m;
}

PlanarMap PlanarMap::cross(ScalarFn2 xbar, ScalarFn2 y_of, std::optional<Rect> dom) {
    PlanarMap m;
    m.form = MapForm::Cross;
    m.cross_x = std::move(xbar);
    m.cross_y = std::move(y_of);
    m.domain = dom;
    return m;
}

PlanarMap PlanarMap::cross_reversible(ScalarFn2 f, std::optional<Rect> dom) {
    return cross(f, [f](double x, double yb) { return f(yb, x); }, dom);
}

PlanarMap PlanarMap::implicit(ResidualFn g, std::optional<Rect> dom) {
    PlanarMap m;
    m.form = MapForm::Implicit;
    m.residual = std::move(g);
    m.domain = dom;
    return m;
}

PlanarMap PlanarMap::implicit_reversible(std::function<double(double, double, double, double)> g,
                                         std::optional<Rect> dom) {
    return implicit(
        [g](const Point2& p, const Point2& z) {
            return Point2{g(p.x, p.y, z.x, z.y), g(z.y, z.x, p.y, p.x)};
        },
        dom);
}

NewtonResult newton2(const MapFn& F, Point2 z0, const NewtonOptions& opt, const JacFn& J) {
    NewtonResult res;
    res.z = z0;
    Point2 Fz = safe_call(F, z0);
    res.residual = norm_inf(Fz);
    for (res.iterations = 0; res.iterations <= opt.max_iter; ++res.iterations) {
        if (res.residual <= opt.tol * (1.0 + norm_inf(res.z))) {
            res.converged = true;
            return res;
        }
        if (res.iterations == opt.max_iter || !std::isfinite(res.residual)) break;
        Mat2 D;
        try {
            D = J ? J(res.z) : fd2(F, res.z, opt.fd_step * (1.0 + norm_inf(res.z)));
        } catch (const Error&) {
            break;
        }
        if (!D.allFinite() || std::abs(D.determinant()) == 0.0) break;
        Eigen::Vector2d step = D.partialPivLu().solve(Eigen::Vector2d(-Fz.x, -Fz.y));
        Point2 dz{step(0), step(1)};
        if (!dz.finite()) break;

        double alpha = 1.0;
        bool accepted = false;
        for (int k = 0; k < 30; ++k, alpha *= 0.5) {
            Point2 zt = res.z + dz * alpha;
            Point2 Ft = safe_call(F, zt);
            double rt = norm_inf(Ft);
            if (rt < res.residual) {
                res.z = zt;
                Fz = Ft;
                res.residual = rt;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
    res.converged = res.residual <= opt.tol * (1.0 + norm_inf(res.z));
    return res;
}

Mat2 fd_jacobian(const MapFn& f, const Point2& p, double h) {
    if (h <= 0.0) h = default_step(p);
    auto d = [&](const Point2& e) {
        Point2 f2 = f(p + e * 2.0), f1 = f(p + e), m1 = f(p - e), m2 = f(p - e * 2.0);
        return (m2 - f2 + (f1 - m1) * 8.0) * (1.0 / (12.0 * h));
    };
    Point2 cx = d({h, 0}), cy = d({0, h});
    Mat2 J;
    J << cx.x, cy.x, cx.y, cy.y;
    return J;
}

Point2 evaluate(const PlanarMap& map, const Point2& p, double tol) {
    if (map.domain && !map.domain->contains(p))
        throw OutOfDomain("point outside the domain hint");
    switch (map.form) {
    case MapForm::Explicit:
        return map.fwd(p);
    case MapForm::Cross: {
        // solve y = Y(x, ybar) for ybar, then read off xbar
        double yb = map.predictor ? map.predictor(p).y : p.y;
        auto g = [&](double v) { return map.cross_y(p.x, v) - p.y; };
        double r = g(yb);
        for (int it = 0; it <= 50; ++it) {
            if (std::abs(r) <= tol * (1.0 + std::abs(yb))) return {map.cross_x(p.x, yb), yb};
            if (it == 50 || !std::isfinite(r)) break;
            double h = 1e-6 * (1.0 + std::abs(yb));
            double dg = (g(yb + h) - g(yb - h)) / (2 * h);
            if (dg == 0.0 || !std::isfinite(dg)) break;
            double step = -r / dg, alpha = 1.0;
            bool ok = false;
            for (int k = 0; k < 30; ++k, alpha *= 0.5) {
                double rt = g(yb + alpha * step);
                if (std::abs(rt) < std::abs(r)) {
                    yb += alpha * step;
                    r = rt;
                    ok = true;
                    break;
                }
            }
            if (!ok) break;
        }
        if (std::abs(r) <= tol * (1.0 + std::abs(yb))) return {map.cross_x(p.x, yb), yb};
        throw NoConvergence("cross-form solve, residual " + std::to_string(r));
    }
    case MapForm::Implicit: {
        Point2 z0 = map.predictor ? map.predictor(p) : p;
        NewtonOptions opt;
        opt.tol = tol;
        auto res = newton2([&](const Point2& z) { return map.residual(p, z); }, z0, opt);
        if (!res.converged)
            throw NoConvergence("implicit solve, residual " + std::to_string(res.residual));
        return res.z;
    }
    }
    return p;
}

Mat2 jacobian(const PlanarMap& map, const Point2& p, double h) {
    if (map.jac) return map.jac(p);
    if (h <= 0.0) h = default_step(p);
    if (map.form == MapForm::Explicit) return fd_jacobian(map.fwd, p, h);

    // DT = -(dG/dz)^{-1} dG/dp at the solved image
    Point2 z = evaluate(map, p);
    ResidualFn G = map.form == MapForm::Cross ? cross_residual(map) : map.residual;
    Mat2 A, B;
    residual_partials(G, p, z, h, A, B);
    return -A.partialPivLu().solve(B);
}

Involution Involution::swap_xy() {
    return {[](const Point2& p) { return Point2{p.y, p.x}; },
            [](const Point2&) { return (Mat2() << 0, 1, 1, 0).finished(); }, "L"};
}

Involution Involution::flip_y() {
    return {[](const Point2& p) { return Point2{p.x, -p.y}; },
            [](const Point2&) { return (Mat2() << 1, 0, 0, -1).finished(); }, "R"};
}

Involution Involution::negate() {
    return {[](const Point2& p) { return Point2{-p.x, -p.y}; },
            [](const Point2&) { return (Mat2() << -1, 0, 0, -1).finished(); }, "R1"};
}

double reversibility_residual(const PlanarMap& map, const Involution& R,
                              const std::vector<Point2>& samples, double tol) {
    double worst = 0.0;
    for (const auto& p : samples) {
        Point2 q = R(evaluate(map, R(evaluate(map, p, tol)), tol));
        worst = std::max(worst, norm(q - p));
    }
    return worst;
}

double involution_residual(const Involution& R, const std::vector<Point2>& samples) {
    double worst = 0.0;
    for (const auto& p : samples) worst = std::max(worst, norm(R(R(p)) - p));
    return worst;
}

PlanarMap bochner_conjugacy(const Involution& R, const Point2& p) {
    Mat2 A = R.linear_part ? R.linear_part(p) : fd_jacobian(R.apply, p);
    if (std::abs(A.determinant()) < 1e-14) throw DegenerateLinearPart("det DR|_p vanishes");
    auto apply = [R, A](const Point2& q) {
        Point2 r = R(q);
        return Point2{r.x + A(0, 0) * q.x + A(0, 1) * q.y, r.y + A(1, 0) * q.x + A(1, 1) * q.y};
    };
    JacFn jac = [R, A](const Point2& q) -> Mat2 {
        Mat2 D = R.linear_part ? R.linear_part(q) : fd_jacobian(R.apply, q);
        return D + A;
    };
    return PlanarMap::explicit_map(apply, jac);
}

double conjugacy_residual(const PlanarMap& psi, const Involution& R, const Mat2& A,
                          const std::vector<Point2>& samples) {
    double worst = 0.0;
    for (const auto& q : samples) {
        Point2 lhs = evaluate(psi, R(q));
        Point2 s = evaluate(psi, q);
        Point2 rhs{A(0, 0) * s.x + A(0, 1) * s.y, A(1, 0) * s.x + A(1, 1) * s.y};
        worst = std::max(worst, norm(lhs - rhs));
    }
    return worst;
}

double area_preservation_residual(const PlanarMap& map, const std::vector<Point2>& samples) {
    double worst = 0.0;
    for (const auto& p : samples)
        worst = std::max(worst, std::abs(jacobian(map, p).determinant() - 1.0));
    return worst;
}

std::string to_string(FixedKind k) {
    switch (k) {
    case FixedKind::Saddle: return "saddle";
    case FixedKind::Elliptic: return "elliptic";
    case FixedKind::Parabolic: return "parabolic";
    case FixedKind::Attracting: return "attracting";
    case FixedKind::Repelling: return "repelling";
    }
    return "?";
}

FixedPointRecord classify(const Point2& where, const Mat2& J, double band) {
    FixedPointRecord rec;
    rec.location = where;
    const double tr = J.trace(), det = J.determinant();
    rec.jac_det = det;
    const double disc = tr * tr - 4.0 * det;
    if (disc < 0.0) {
        double im = std::sqrt(-disc) / 2.0;
        rec.multipliers = {std::complex<double>(tr / 2, im), std::complex<double>(tr / 2, -im)};
        double r = std::sqrt(std::abs(det));
        if (std::abs(r - 1.0) < band)
            rec.kind = FixedKind::Elliptic;
        else
            rec.kind = r < 1.0 ? FixedKind::Attracting : FixedKind::Repelling;
        return rec;
    }
    double sq = std::sqrt(disc);
    // avoid cancellation in the smaller root
    double big = tr >= 0 ? (tr + sq) / 2 : (tr - sq) / 2;
    double small = big != 0.0 ? det / big : 0.0;
    rec.multipliers = {std::complex<double>(small), std::complex<double>(big)};
    double a = std::abs(small), b = std::abs(big);
    if (std::abs(a - 1.0) < band || std::abs(b - 1.0) < band)
        rec.kind = FixedKind::Parabolic;
    else if (a < 1.0 && b > 1.0)
        rec.kind = FixedKind::Saddle;
    else if (b < 1.0)
        rec.kind = FixedKind::Attracting;
    else if (a > 1.0)
        rec.kind = FixedKind::Repelling;
    else
        rec.kind = FixedKind::Saddle;
    return rec;
}

std::vector<FixedPointRecord> find_fixed_points(const PlanarMap& map, const Grid& grid,
                                                double tol, const Involution* R) {
    std::vector<NewtonResult> roots;
    const Rect& r = grid.rect;
    const double dx = (r.x1 - r.x0) / grid.nx, dy = (r.y1 - r.y0) / grid.ny;
    const double inner_tol = std::max(tol * 0.1, 1e-14);
    MapFn F = [&](const Point2& z) { return evaluate(map, z, inner_tol) - z; };
    JacFn J;
    if (map.jac)
        J = [&](const Point2& z) -> Mat2 { return map.jac(z) - Mat2::Identity(); };
    NewtonOptions opt;
    opt.tol = tol;
    // two nearby roots are one degenerate root if their midpoint is also a root
    // up to curvature, O(d^2); between distinct simple roots it is O(|DF| d)
    auto same_root = [&](const Point2& a, const Point2& b) {
        const double d = norm(a - b);
        if (d < kDedupTol * (1.0 + norm(a))) return true;
        if (d > 1e-3 * (1.0 + norm(a))) return false;
        const Point2 m = (a + b) * 0.5;
        try {
            return norm_inf(F(m)) <= (10.0 * tol + 10.0 * d * d) * (1.0 + norm_inf(m));
        } catch (const Error&) {
            return false;
        }
    };
    for (int i = 0; i < grid.nx; ++i) {
        for (int j = 0; j < grid.ny; ++j) {
            Point2 seed{r.x0 + (i + 0.5) * dx, r.y0 + (j + 0.5) * dy};
            NewtonResult res;
            try {
                res = newton2(F, seed, opt, J);
            } catch (const Error&) {
                continue;
            }
            if (!res.converged || !r.contains(res.z)) continue;
            auto dup = std::find_if(roots.begin(), roots.end(),
                                    [&](const NewtonResult& q) { return same_root(q.z, res.z); });
            if (dup == roots.end())
                roots.push_back(res);
            else if (res.residual < dup->residual)
                *dup = res;
        }
    }

    std::vector<FixedPointRecord> out;
    for (auto& root : roots) {
        Point2 z = root.z;
        bool sym = false;
        if (R) {
            const Point2 Rz = (*R)(z);
            sym = same_root(z, Rz) || norm(Rz - z) < kSymmetryTol * (1.0 + norm(z));
            // the midpoint lies on Fix R for affine involutions
            if (sym) z = (z + Rz) * 0.5;
        }
        FixedPointRecord rec = classify(z, jacobian(map, z));
        rec.symmetric = sym;
        out.push_back(rec);
    }
    std::sort(out.begin(), out.end(), [](const FixedPointRecord& a, const FixedPointRecord& b) {
        return a.location.x != b.location.x ? a.location.x < b.location.x : a.location.y < b.location.y;
    });
    // symmetric copies of one degenerate root can survive as separate entries
    out.erase(std::unique(out.begin(), out.end(),
                          [](const FixedPointRecord& a, const FixedPointRecord& b) {
                              return a.symmetric && b.symmetric &&
                                     norm(a.location - b.location) < kDedupTol * (1.0 + norm(a.location));
                          }),
              out.end());
    return out;
}

int default_threads() {
    if (const char* env = std::getenv("REVMAP_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t nt = std::min<std::size_t>(threads, n);
    for (std::size_t t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

} // namespace revmap
