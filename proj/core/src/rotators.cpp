// SPDX-License-Identifier: Apache-2.0
#include "revmap/rotators.hpp"
#include "revmap/errors.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace revmap {

namespace odeint = boost::numeric::odeint;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

using State2 = std::array<double, 2>;
using State6 = std::array<double, 6>;

struct Reduced {
    double eps;
    void operator()(const State2& s, State2& ds, double rho) const {
        const double D = 2.0 + eps * std::cos(rho - s[1]);
        ds[0] = 2.0 * eps * std::sin(s[0]) * std::sin(s[1]) / D;
        ds[1] = (1.0 - eps * std::cos(rho - s[1]) - 2.0 * eps * std::cos(s[0]) * std::cos(s[1])) / D;
    }
};

// state plus the 2x2 variational matrix, column-major
struct ReducedVar {
    double eps;
    void operator()(const State6& s, State6& ds, double rho) const {
        const double sx = std::sin(s[0]), cx = std::cos(s[0]);
        const double se = std::sin(s[1]), ce = std::cos(s[1]);
        const double cr = std::cos(rho - s[1]), sr = std::sin(rho - s[1]);
        const double D = 2.0 + eps * cr;
        const double N = 1.0 - eps * cr - 2.0 * eps * cx * ce;
        ds[0] = 2.0 * eps * sx * se / D;
        ds[1] = N / D;
        const double dD_de = eps * sr;
        const double a11 = 2.0 * eps * cx * se / D;
        const double a12 = 2.0 * eps * sx * ce / D - 2.0 * eps * sx * se * dD_de / (D * D);
        const double a21 = 2.0 * eps * sx * ce / D;
        const double a22 = (-eps * sr + 2.0 * eps * cx * se) / D - N * dD_de / (D * D);
        for (int col = 0; col < 2; ++col) {
            const double u = s[2 + 2 * col], v = s[3 + 2 * col];
            ds[2 + 2 * col] = a11 * u + a12 * v;
            ds[3 + 2 * col] = a21 * u + a22 * v;
        }
    }
};

void check_eps(double eps) {
    if (!(std::abs(eps) < 2.0)) throw DenominatorVanishes("|eps| must be below 2");
}

template <class State, class Sys>
void flow(Sys sys, State& x, double from, double to, const PTOptions& opt) {
    if (from == to) return;
    auto stepper = odeint::make_controlled(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<State>());
    const double dt = (to > from ? 1.0 : -1.0) * 0.05;
    try {
        odeint::integrate_adaptive(stepper, sys, x, from, to, dt);
    } catch (const std::exception& e) {
        throw IntegratorFailure(e.what());
    }
    for (double v : x)
        if (!std::isfinite(v)) throw IntegratorFailure("non-finite state");
}

Point2 flow_to(double eps, const Point2& p, double from, double to, const PTOptions& opt) {
    State2 x{p.x, p.y};
    flow(Reduced{eps}, x, from, to, opt);
    return {x[0], x[1]};
}

MapJac flow_jac(double eps, const Point2& p, double from, double to, const PTOptions& opt) {
    State6 x{p.x, p.y, 1.0, 0.0, 0.0, 1.0};
    flow(ReducedVar{eps}, x, from, to, opt);
    MapJac r;
    r.image = {x[0], x[1]};
    r.J << x[2], x[4], x[3], x[5];
    return r;
}

Point2 wrap2(const Point2& p) { return {wrap_angle(p.x), wrap_angle(p.y)}; }

std::uint64_t splitmix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

double wrap_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r -= kTwoPi;
    return r;
}

double angle_diff(double a, double b) {
    double d = std::remainder(a - b, kTwoPi);
    return d;
}

double angle_dist(const Point2& a, const Point2& b) {
    return std::max(std::abs(angle_diff(a.x, b.x)), std::abs(angle_diff(a.y, b.y)));
}

Vec3 pik1_field(const Vec3& psi, double eps) {
    const double s1 = std::sin(psi[0]), s2 = std::sin(psi[1]), s3 = std::sin(psi[2]);
    return {1.0 - 2.0 * eps * s1 + eps * s2, 1.0 - 2.0 * eps * s2 + eps * s1 + eps * s3,
            1.0 - 2.0 * eps * s3 + eps * s2};
}

Vec3 pik4_field(const Vec3& s, double eps) {
    check_eps(eps);
    State2 x{s[0], s[1]}, dx{};
    Reduced{eps}(x, dx, s[2]);
    return {dx[0], dx[1], 1.0};
}

Vec3 to_reduced(const Vec3& psi) {
    const double eta = (psi[0] + psi[2] - kPi) / 2.0;
    return {(psi[0] - psi[2]) / 2.0, eta, eta + psi[1] - 1.5 * kPi};
}

Vec3 from_reduced(const Vec3& s) {
    // psi1 = eta + xi + pi/2, psi3 = eta - xi + pi/2, psi2 = rho - eta + 3 pi / 2
    return {s[1] + s[0] + 0.5 * kPi, s[2] - s[1] + 1.5 * kPi, s[1] - s[0] + 0.5 * kPi};
}

Point2 poincare_map(const PoincareSection& sec, const Point2& p) {
    check_eps(sec.epsilon);
    return wrap2(flow_to(sec.epsilon, p, sec.from_rho, sec.to_rho, sec.ode));
}

MapJac poincare_map_jac(const PoincareSection& sec, const Point2& p) {
    check_eps(sec.epsilon);
    MapJac r = flow_jac(sec.epsilon, p, sec.from_rho, sec.to_rho, sec.ode);
    r.image = wrap2(r.image);
    return r;
}

Point2 S_map(const Point2& p) { return wrap2({kPi - p.x, p.y + kPi}); }

namespace {

PlanarMap section_map(double eps, double from, double to, const PTOptions& opt) {
    check_eps(eps);
    PoincareSection sec{from, to, eps, opt};
    return PlanarMap::explicit_map([sec](const Point2& p) { return poincare_map(sec, p); },
                                   [sec](const Point2& p) { return poincare_map_jac(sec, p).J; });
}

Mat2 S_jac() {
    Mat2 J;
    J << -1.0, 0.0, 0.0, 1.0;
    return J;
}

} // namespace

PlanarMap full_map(double eps, const PTOptions& opt) { return section_map(eps, 0.0, kTwoPi, opt); }
PlanarMap half_map(double eps, const PTOptions& opt) { return section_map(eps, 0.0, kPi, opt); }
PlanarMap full_map_inverse(double eps, const PTOptions& opt) {
    return section_map(eps, kTwoPi, 0.0, opt);
}

PlanarMap root_map(double eps, const PTOptions& opt) {
    check_eps(eps);
    PoincareSection sec{0.0, kPi, eps, opt};
    return PlanarMap::explicit_map([sec](const Point2& p) { return S_map(poincare_map(sec, p)); },
                                   [sec](const Point2& p) { return Mat2(S_jac() * poincare_map_jac(sec, p).J); });
}

Involution reversor_R() {
    Involution r;
    r.apply = [](const Point2& p) { return wrap2({p.x, -p.y}); };
    r.linear_part = [](const Point2&) {
        Mat2 J;
        J << 1.0, 0.0, 0.0, -1.0;
        return J;
    };
    r.label = "R";
    return r;
}

Involution reversor_R1() {
    Involution r;
    // point reflection about (pi/2, pi/2), the centre of the half-period section
    r.apply = [](const Point2& p) { return wrap2({kPi - p.x, kPi - p.y}); };
    r.linear_part = [](const Point2&) { return Mat2(-Mat2::Identity()); };
    r.label = "R1";
    return r;
}

double factorization_residual(double eps, const std::vector<Point2>& samples, const PTOptions& opt) {
    const PlanarMap T = full_map(eps, opt), G = root_map(eps, opt);
    double worst = 0.0;
    for (const auto& p : samples) worst = std::max(worst, angle_dist(evaluate(T, p), evaluate(G, evaluate(G, p))));
    return worst;
}

double rotator_reversibility_residual(const PlanarMap& map, const Involution& R,
                                      const std::vector<Point2>& samples) {
    double worst = 0.0;
    for (const auto& p : samples) {
        const Point2 q = R(evaluate(map, R(evaluate(map, p))));
        worst = std::max(worst, angle_dist(q, p));
    }
    return worst;
}

std::vector<Point2> random_torus_points(std::size_t n, std::uint64_t seed) {
    boost::random::mt19937_64 rng(seed);
    boost::random::uniform_real_distribution<double> u(0.0, kTwoPi);
    std::vector<Point2> out(n);
    for (auto& p : out) {
        p.x = u(rng);
        p.y = u(rng);
    }
    return out;
}

double reflection_test(double eps, int n, double xi0, double eta0, const PTOptions& opt) {
    check_eps(eps);
    return std::sin(flow_to(eps, {xi0, eta0}, 0.0, n * kPi, opt).y);
}

namespace {

MapJac iterate_jac(double eps, const Point2& p, int n, const PTOptions& opt) {
    MapJac acc{p, Mat2::Identity()};
    for (int i = 0; i < n; ++i) {
        MapJac s = flow_jac(eps, acc.image, 0.0, kTwoPi, opt);
        acc.image = s.image;
        acc.J = s.J * acc.J;
    }
    return acc;
}

MapJac root_iterate_jac(double eps, const Point2& p, int n, const PTOptions& opt) {
    MapJac acc{p, Mat2::Identity()};
    for (int i = 0; i < n; ++i) {
        MapJac s = flow_jac(eps, acc.image, 0.0, kPi, opt);
        acc.image = S_map(s.image);
        acc.J = S_jac() * s.J * acc.J;
    }
    return acc;
}

// Newton on T^n(p) - p with angle-aware residual
bool newton_periodic(double eps, int n, Point2& p, const PTOptions& opt) {
    for (int it = 0; it < 30; ++it) {
        MapJac m = iterate_jac(eps, p, n, opt);
        const Eigen::Vector2d r(angle_diff(m.image.x, p.x), angle_diff(m.image.y, p.y));
        if (r.lpNorm<Eigen::Infinity>() < 1e-11) {
            p = wrap2(p);
            return true;
        }
        const Mat2 A = m.J - Mat2::Identity();
        if (std::abs(A.determinant()) < 1e-14) return false;
        Eigen::Vector2d d = -A.lu().solve(r);
        const double dn = d.lpNorm<Eigen::Infinity>();
        if (dn > 0.5) d *= 0.5 / dn;
        p = {p.x + d(0), p.y + d(1)};
    }
    return false;
}

} // namespace

std::vector<PeriodicOrbit> find_periodic(double eps, int n, const std::vector<Point2>& seeds_in,
                                         const PTOptions& opt, int grid) {
    check_eps(eps);
    if (n < 1) throw DomainError("period must be positive");
    std::vector<Point2> seeds;
    // symmetric candidates from sign changes of the reflection test
    constexpr int kScan = 256;
    for (double eta0 : {0.0, kPi}) {
        double xa = 0.0, ga = reflection_test(eps, n, xa, eta0, opt);
        for (int i = 1; i <= kScan; ++i) {
            const double xb = kTwoPi * i / kScan;
            const double gb = reflection_test(eps, n, xb, eta0, opt);
            if ((ga > 0) != (gb > 0)) {
                double lo = xa, hi = xb, glo = ga;
                for (int b = 0; b < 60 && hi - lo > 1e-13; ++b) {
                    const double mid = 0.5 * (lo + hi), gm = reflection_test(eps, n, mid, eta0, opt);
                    if ((gm > 0) == (glo > 0)) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                seeds.push_back({0.5 * (lo + hi), eta0});
            }
            xa = xb;
            ga = gb;
        }
    }
    if (seeds_in.empty()) {
        for (int i = 0; i < grid; ++i)
            for (int j = 0; j < grid; ++j)
                seeds.push_back({kTwoPi * (i + 0.5) / grid, kTwoPi * (j + 0.5) / grid});
    } else {
        seeds.insert(seeds.end(), seeds_in.begin(), seeds_in.end());
    }

    std::vector<PeriodicOrbit> out;
    auto known = [&](const Point2& q) {
        for (const auto& o : out)
            for (const auto& r : o.points)
                if (angle_dist(q, r) < 1e-7) return true;
        return false;
    };
    auto add = [&](Point2 p) {
        if (!newton_periodic(eps, n, p, opt) || known(p)) return false;
        PeriodicOrbit o;
        o.points.push_back(p);
        for (int i = 1; i < n; ++i) o.points.push_back(poincare_map({0.0, kTwoPi, eps, opt}, o.points.back()));
        // minimal period check: drop points of a shorter period
        for (int i = 1; i < n; ++i)
            if (angle_dist(o.points[i], p) < 1e-8) return false;
        const MapJac m = iterate_jac(eps, p, n, opt);
        o.record = classify(p, m.J, 1e-6);
        const Point2 rp = reversor_R()(p);
        bool sym = false;
        for (const auto& q : o.points) sym = sym || angle_dist(q, rp) < 1e-7;
        o.symmetric = sym;
        o.record.symmetric = sym;
        const MapJac g = root_iterate_jac(eps, p, n, opt);
        o.root_residual = angle_dist(g.image, p);
        o.root_label = o.root_residual < 1e-7 ? "fixed" : "period2";
        o.root_record = classify(p, g.J, 1e-6);
        out.push_back(std::move(o));
        return true;
    };
    for (const auto& s : seeds) {
        try {
            if (add(s)) {
                // the xi -> -xi symmetry carries orbits to orbits
                const Point2 m = wrap2({-out.back().points[0].x, out.back().points[0].y});
                add(m);
            }
        } catch (const IntegratorFailure&) {
        }
    }
    std::sort(out.begin(), out.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
        if (a.symmetric != b.symmetric) return a.symmetric;
        if (a.points[0].x != b.points[0].x) return a.points[0].x < b.points[0].x;
        return a.points[0].y < b.points[0].y;
    });
    return out;
}

double fold_indicator(double eps, int n, const PTOptions& opt, Point2* argmin) {
    if (n % 2 == 0) throw DomainError("fold_indicator needs an odd period");
    constexpr int kScan = 128;
    double best = 1e300;
    Point2 where{};
    for (double eta0 : {0.0, kPi}) {
        // sign of the test in the integrable limit
        const double s0 = std::sin(eta0 + n * kPi / 2.0) > 0 ? 1.0 : -1.0;
        auto f = [&](double xi) { return s0 * reflection_test(eps, n, xi, eta0, opt); };
        std::vector<double> v(kScan);
        for (int i = 0; i < kScan; ++i) v[i] = f(kTwoPi * i / kScan);
        const int i0 = int(std::min_element(v.begin(), v.end()) - v.begin());
        const double h = kTwoPi / kScan;
        auto r = boost::math::tools::brent_find_minima(f, kTwoPi * i0 / kScan - h, kTwoPi * i0 / kScan + h, 40);
        const double val = std::min(r.second, v[i0]);
        if (val < best) {
            best = val;
            where = {wrap_angle(r.second <= v[i0] ? r.first : kTwoPi * i0 / kScan), eta0};
        }
    }
    if (argmin) *argmin = where;
    return best;
}

FoldResult fold_locate(int n, double eps_lo, double eps_hi, double tol, const PTOptions& opt) {
    check_eps(eps_lo);
    check_eps(eps_hi);
    if (!(eps_lo < eps_hi)) throw BracketInvalid("empty bracket");
    double flo = fold_indicator(eps_lo, n, opt);
    double fhi = fold_indicator(eps_hi, n, opt);
    if (!(flo > 0.0) || !(fhi <= 0.0))
        throw BracketInvalid("orbits must be absent at the lower end and present at the upper end");
    double lo = eps_lo, hi = eps_hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (fold_indicator(mid, n, opt) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    FoldResult fr;
    fr.eps_star = 0.5 * (lo + hi);
    fr.interval = hi - lo;
    fold_indicator(fr.eps_star, n, opt, &fr.point);
    const MapJac m = iterate_jac(fr.eps_star, fr.point, n, opt);
    fr.multipliers = classify(fr.point, m.J, 1e-6).multipliers;
    return fr;
}

std::uint64_t Histogram2D::total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

double Histogram2D::frac(int i, int j) const {
    const auto t = total();
    return t ? double(counts[std::size_t(i) * bins + j]) / double(t) : 0.0;
}

Histogram2D Histogram2D::reflected_eta() const {
    Histogram2D r = *this;
    for (int i = 0; i < bins; ++i)
        for (int j = 0; j < bins; ++j)
            r.counts[std::size_t(i) * bins + j] = counts[std::size_t(i) * bins + (bins - 1 - j)];
    return r;
}

double half_l1(const Histogram2D& a, const Histogram2D& b) {
    if (a.bins != b.bins) throw DomainError("histogram sizes differ");
    const double ta = double(a.total()), tb = double(b.total());
    if (ta == 0.0 || tb == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t k = 0; k < a.counts.size(); ++k) s += std::abs(a.counts[k] / ta - b.counts[k] / tb);
    return 0.5 * s;
}

MeasureHalf measure_iteration(double eps, const MeasureOptions& opt, int direction) {
    check_eps(eps);
    if (opt.bins < 1 || opt.n_samples < 1 || opt.n_steps < 1 || opt.burn_in < 0 || opt.burn_in >= opt.n_steps)
        throw DomainError("invalid measure options");
    const double from = direction > 0 ? 0.0 : kTwoPi, to = direction > 0 ? kTwoPi : 0.0;
    const int nt = std::max(1, opt.threads);
    std::vector<std::vector<std::uint64_t>> local(nt, std::vector<std::uint64_t>(std::size_t(opt.bins) * opt.bins, 0));
    std::vector<int> dropped(opt.n_samples, 0);
    const double scale = opt.bins / kTwoPi;
    // samples are split into contiguous blocks so each worker owns its counts
    parallel_for(std::size_t(nt), nt, [&](std::size_t w) {
        auto& H = local[w];
        const std::size_t lo = w * opt.n_samples / nt, hi = (w + 1) * opt.n_samples / nt;
        for (std::size_t i = lo; i < hi; ++i) {
            boost::random::mt19937_64 rng(splitmix(opt.seed ^ splitmix(i)));
            boost::random::uniform_real_distribution<double> u(0.0, kTwoPi);
            Point2 p{u(rng), u(rng)};
            // backward runs start from the R-images of the forward samples; the
            // uniform measure is R-invariant, so both runs sample it
            if (direction < 0) p = wrap2({p.x, -p.y});
            std::vector<std::size_t> cells;
            cells.reserve(opt.n_steps - opt.burn_in);
            try {
                for (int s = 0; s < opt.n_steps; ++s) {
                    p = wrap2(flow_to(eps, p, from, to, opt.ode));
                    if (s >= opt.burn_in) {
                        const int bi = std::min(opt.bins - 1, int(p.x * scale));
                        const int bj = std::min(opt.bins - 1, int(p.y * scale));
                        cells.push_back(std::size_t(bi) * opt.bins + bj);
                    }
                }
            } catch (const IntegratorFailure&) {
                dropped[i] = 1;
                continue;
            }
            for (auto c : cells) ++H[c];
        }
    });
    MeasureHalf out;
    out.hist.bins = opt.bins;
    out.hist.counts.assign(std::size_t(opt.bins) * opt.bins, 0);
    for (const auto& H : local)
        for (std::size_t k = 0; k < H.size(); ++k) out.hist.counts[k] += H[k];
    for (int d : dropped) out.dropped += d;
    return out;
}

MeasurePair measure_pair(double eps, const MeasureOptions& opt) {
    MeasureHalf f = measure_iteration(eps, opt, +1);
    MeasureHalf b = measure_iteration(eps, opt, -1);
    MeasurePair mp;
    mp.forward_hist = std::move(f.hist);
    mp.backward_hist = std::move(b.hist);
    mp.n_iterations = opt.n_steps;
    mp.n_samples = opt.n_samples;
    mp.seed = opt.seed;
    mp.dropped = f.dropped + b.dropped;
    mp.asymmetry = half_l1(mp.forward_hist, mp.backward_hist);
    mp.reflected_distance = half_l1(mp.forward_hist, mp.backward_hist.reflected_eta());
    return mp;
}

} // namespace revmap
