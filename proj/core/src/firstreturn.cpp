// SPDX-License-Identifier: Apache-2.0
#include "revmap/firstreturn.hpp"
#include "revmap/errors.hpp"

#include <Eigen/Eigenvalues>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace revmap {

void GlobalMapCoeffs::validate() const {
    if (b == 0.0 || c == 0.0 || d == 0.0) throw DomainError("b, c and d must be nonzero");
    if (!(lambda1 > 0.0 && lambda1 < 1.0 && lambda2 > 0.0 && lambda2 < 1.0))
        throw DomainError("lambda1, lambda2 must lie in (0, 1)");
    if (!(alpha1 > 0.0 && alpha2 > 0.0)) throw DomainError("alpha1, alpha2 must be positive");
}

int balanced_m(const GlobalMapCoeffs& g, int k) {
    return std::max(1, int(std::lround(k * std::log(g.lambda1) / std::log(g.lambda2))));
}

double beta_km(const ReturnInstance& inst) {
    const auto& g = inst.coeffs;
    return g.b * std::pow(g.lambda1, -inst.k) * std::pow(g.lambda2, inst.m);
}

void check_balance(const ReturnInstance& inst) {
    if (inst.k < 1 || inst.m < 1) throw BalanceViolation("k and m must be positive");
    const double r = std::pow(inst.coeffs.lambda1, inst.k) / std::pow(inst.coeffs.lambda2, inst.m);
    if (!(r >= 1.0 / inst.theta && r <= inst.theta))
        throw BalanceViolation("l1^k / l2^m = " + std::to_string(r) + " outside [1/theta, theta]");
}

double TkmEquation::operator()(double x, double y, double xb, double yb) const {
    double v = M + c * yb + d * xb * xb + f11K * xb * yb + f03K * xb * xb * xb - Bp * y - aL * x -
               l02L * y * y;
    for (const auto& t : terms) v += eps * t[0] * std::sin(t[1] * x + t[2] * y + t[3] * xb + t[4] * yb + t[5]);
    return v;
}

std::array<double, 4> TkmEquation::grad(double x, double y, double xb, double yb) const {
    std::array<double, 4> g{-aL, -Bp - 2.0 * l02L * y, 2.0 * d * xb + f11K * yb + 3.0 * f03K * xb * xb,
                            c + f11K * xb};
    for (const auto& t : terms) {
        const double cs = eps * t[0] * std::cos(t[1] * x + t[2] * y + t[3] * xb + t[4] * yb + t[5]);
        for (int i = 0; i < 4; ++i) g[i] += cs * t[i + 1];
    }
    return g;
}

TkmEquation tkm_equation(const ReturnInstance& inst) {
    const auto& g = inst.coeffs;
    const double K = std::pow(g.lambda1, inst.k), L = std::pow(g.lambda2, inst.m);
    TkmEquation e{};
    e.M = inst.M;
    e.c = g.c;
    e.d = g.d;
    e.Bp = g.b * L / K;
    if (inst.lambda_terms) {
        e.f11K = g.f11 * K;
        e.f03K = g.f03 * K;
        e.aL = g.a * L;
        e.l02L = g.l02 * L;
    }
    if (inst.remainder_seed) {
        e.eps = inst.k * K * K;
        boost::random::mt19937_64 rng(*inst.remainder_seed);
        boost::random::uniform_real_distribution<double> u(-1.0, 1.0);
        boost::random::uniform_real_distribution<double> ph(0.0, 2.0 * std::numbers::pi);
        for (int n = 0; n < 3; ++n) {
            std::array<double, 6> t{};
            t[0] = u(rng) / 3.0;
            for (int i = 1; i <= 4; ++i) t[i] = u(rng);
            t[5] = ph(rng);
            e.terms.push_back(t);
        }
    }
    return e;
}

Mat2 tkm_jacobian(const TkmEquation& g, const Point2& p, const Point2& im) {
    const auto g1 = g.grad(p.x, p.y, im.x, im.y);
    const auto g2 = g.grad(im.y, im.x, p.y, p.x);
    Mat2 A, B;
    A << g1[2], g1[3], g2[1], g2[0];
    B << g1[0], g1[1], g2[3], g2[2];
    if (std::abs(A.determinant()) < 1e-300) throw DegenerateLinearPart("singular implicit pair");
    return -A.inverse() * B;
}

PlanarMap build_Tkm(const ReturnInstance& inst) {
    inst.coeffs.validate();
    check_balance(inst);
    const TkmEquation g = tkm_equation(inst);
    PlanarMap map = PlanarMap::implicit_reversible(g);
    const HParams h = to_HParams(inst);
    const double s = h_scale(inst);
    map.predictor = [h, s](const Point2& p) { return eval_H(h, {p.x / s, p.y / s}) * s; };
    PlanarMap base = map;
    map.jac = [base, g](const Point2& p) { return tkm_jacobian(g, p, evaluate(base, p)); };
    return map;
}

HParams to_HParams(const ReturnInstance& inst) {
    const auto& g = inst.coeffs;
    const double beta = beta_km(inst);
    return {g.c / beta, -g.d * inst.M / (beta * beta)};
}

double M_of_Mtilde(const ReturnInstance& inst, double M_tilde) {
    const double beta = beta_km(inst);
    return -M_tilde * beta * beta / inst.coeffs.d;
}

namespace {

double mu_base(const GlobalMapCoeffs& g, int k, int m) {
    return std::pow(g.lambda2, m) * g.alpha2 - g.c * std::pow(g.lambda1, k) * g.alpha1;
}

double mu_offset_coeff(const GlobalMapCoeffs& g, int k, int m) {
    // (b - c l1^k l2^-m)^2 l2^2m / d
    const double L = std::pow(g.lambda2, m);
    const double t = g.b - g.c * std::pow(g.lambda1, k) / L;
    return t * t * L * L / g.d;
}

FixedKind kind_of(const Mat2& J) { return classify(Point2{}, J, kParabolicBand).kind; }

} // namespace

double mu_of_M(const ReturnInstance& inst) {
    const auto& g = inst.coeffs;
    const double Mt = to_HParams(inst).M_tilde;
    return mu_base(g, inst.k, inst.m) -
           (g.b * g.b / g.d) * Mt * std::pow(g.lambda2, 2 * inst.m);
}

double M_of_mu(const ReturnInstance& inst, double mu) {
    const auto& g = inst.coeffs;
    const double Mt = (mu_base(g, inst.k, inst.m) - mu) /
                      ((g.b * g.b / g.d) * std::pow(g.lambda2, 2 * inst.m));
    return M_of_Mtilde(inst, Mt);
}

double mu_fold_formula(const GlobalMapCoeffs& g, int k, int m) {
    return mu_base(g, k, m) + 0.25 * mu_offset_coeff(g, k, m);
}

double mu_pf_formula(const GlobalMapCoeffs& g, int k, int m) {
    return mu_base(g, k, m) - 0.75 * mu_offset_coeff(g, k, m);
}

namespace {

// g on the diagonal and its derivatives
struct Diag {
    const TkmEquation& g;
    double q(double p) const { return g(p, p, p, p); }
    double dq(double p) const {
        auto gr = g.grad(p, p, p, p);
        return gr[0] + gr[1] + gr[2] + gr[3];
    }
    double d2q(double p) const {
        const double h = 1e-5 * (1.0 + std::abs(p));
        return (dq(p + h) - dq(p - h)) / (2.0 * h);
    }
};

std::vector<double> real_roots_poly(const std::vector<double>& c) { // c[0] + c[1] p + ...
    int n = int(c.size()) - 1;
    while (n > 0 && std::abs(c[n]) < 1e-300) --n;
    std::vector<double> out;
    if (n == 0) return out;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    for (int i = 0; i < n; ++i) {
        auto r = es.eigenvalues()(i);
        if (std::abs(r.imag()) <= 1e-7 * (1.0 + std::abs(r.real()))) out.push_back(r.real());
    }
    return out;
}

std::vector<double> diag_poly(const TkmEquation& g) {
    return {g.M, g.c - g.Bp - g.aL, g.d + g.f11K - g.l02L, g.f03K};
}

double polish(const Diag& D, double p, bool& ok) {
    ok = false;
    for (int it = 0; it < 60; ++it) {
        const double f = D.q(p), df = D.dq(p);
        if (df == 0.0) return p;
        const double step = f / df;
        p -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + std::abs(p))) {
            ok = true;
            break;
        }
    }
    if (!ok) ok = std::abs(D.q(p)) < 1e-13 * (1.0 + std::abs(p));
    return p;
}

// critical point of q on the diagonal nearest the H-coordinate location X0
bool fold_indicator(const ReturnInstance& inst, double X0, double& value, double* crit_out = nullptr) {
    const TkmEquation g = tkm_equation(inst);
    const Diag D{g};
    const auto pc = diag_poly(g);
    const double s = h_scale(inst);
    auto crit = real_roots_poly({pc[1], 2.0 * pc[2], 3.0 * pc[3]});
    if (crit.empty()) return false;
    double best = crit[0];
    for (double p : crit)
        if (std::abs(p / s - X0) < std::abs(best / s - X0)) best = p;
    for (int it = 0; it < 40; ++it) {
        const double d2 = D.d2q(best);
        if (d2 == 0.0) break;
        const double step = D.dq(best) / d2;
        best -= step;
        if (std::abs(step) < 1e-15 * (1.0 + std::abs(best))) break;
    }
    // two nearby roots exist iff q and q'' have opposite signs at the critical point
    value = D.q(best) * D.d2q(best);
    if (crit_out) *crit_out = best;
    return true;
}

} // namespace

std::vector<TkmFixedPoint> tkm_symmetric_points(const ReturnInstance& inst, double window) {
    const TkmEquation g = tkm_equation(inst);
    const Diag D{g};
    const double s = h_scale(inst);
    std::vector<TkmFixedPoint> out;
    for (double p0 : real_roots_poly(diag_poly(g))) {
        bool ok = false;
        const double p = polish(D, p0, ok);
        if (!ok || std::abs(p / s) > window) continue;
        bool dup = false;
        for (const auto& q : out) dup = dup || std::abs(q.z.x - p) < kDedupTol * (1.0 + std::abs(p));
        if (dup) continue;
        TkmFixedPoint fp;
        fp.z = {p, p};
        fp.J = tkm_jacobian(g, fp.z, fp.z);
        fp.symmetric = true;
        fp.kind = kind_of(fp.J);
        out.push_back(fp);
    }
    std::sort(out.begin(), out.end(), [s](const auto& a, const auto& b) { return a.z.x / s > b.z.x / s; });
    return out;
}

AsymmetricPair asymmetric_jacobians(const ReturnInstance& inst) {
    inst.coeffs.validate();
    check_balance(inst);
    const TkmEquation g = tkm_equation(inst);
    const double s = h_scale(inst);
    const auto hpts = all_fixed_points(to_HParams(inst));
    std::vector<Point2> seeds;
    for (const auto& fp : hpts)
        if (!fp.symmetric) seeds.push_back(fp.location * s);
    if (seeds.empty()) throw NoAsymmetricPair("no asymmetric pair in the truncated map");

    auto F = [&g](const Point2& z) { return Point2{g(z.x, z.y, z.x, z.y), g(z.y, z.x, z.y, z.x)}; };
    auto JF = [&g](const Point2& z) {
        const auto a = g.grad(z.x, z.y, z.x, z.y);
        const auto b = g.grad(z.y, z.x, z.y, z.x);
        Mat2 J;
        J << a[0] + a[2], a[1] + a[3], b[1] + b[3], b[0] + b[2];
        return J;
    };
    NewtonOptions no;
    no.tol = 1e-15;
    no.max_iter = 80;
    Point2 found{};
    bool ok = false;
    for (const auto& seed : seeds) {
        auto r = newton2(F, seed, no, JF);
        if (norm_inf(F(r.z)) > 1e-12 * (1.0 + norm_inf(r.z))) continue;
        if (std::abs(r.z.x - r.z.y) < 1e-6 * (1.0 + norm_inf(r.z))) continue;
        found = r.z;
        ok = true;
        break;
    }
    if (!ok) throw NoAsymmetricPair("Newton did not reach an off-diagonal fixed point");

    AsymmetricPair pr;
    const Point2 other{found.y, found.x};
    const bool first_plus = found.x / s > other.x / s;
    pr.plus = first_plus ? found : other;
    pr.minus = first_plus ? other : found;
    const Mat2 Jp = tkm_jacobian(g, pr.plus, pr.plus), Jm = tkm_jacobian(g, pr.minus, pr.minus);
    pr.J_plus = Jp.determinant();
    pr.J_minus = Jm.determinant();
    pr.kind_plus = kind_of(Jp);
    pr.kind_minus = kind_of(Jm);
    const auto& c = inst.coeffs;
    const double t = c.Q() * std::pow(c.lambda1, inst.k) / (c.b * c.c);
    pr.prediction = 1.0 + t * (pr.plus.x - pr.plus.y);
    pr.printed_prediction = 1.0 + t * (pr.plus.y - pr.plus.x);
    return pr;
}

std::string to_string(TangencyType t) { return t == TangencyType::Inner ? "inner" : "outer"; }

namespace {

// bisection in M tilde for a sign change of f between lo and hi; stops when the
// bracket in M is below M_tol
template <class F>
double bisect(const ReturnInstance& base, F f, double lo, double hi, double flo, double M_tol) {
    const double scale = std::abs(M_of_Mtilde(base, 1.0));
    for (int it = 0; it < 200 && std::abs(hi - lo) * scale > M_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

CascadeRow scan_one(const GlobalMapCoeffs& coeffs, int k, int m, const CascadeOptions& opt) {
    CascadeRow row;
    row.k = k;
    row.m = m;
    ReturnInstance base;
    base.coeffs = coeffs;
    base.k = k;
    base.m = m;
    check_balance(base);
    auto at = [&](double Mt) {
        ReturnInstance r = base;
        r.M = M_of_Mtilde(base, Mt);
        return r;
    };
    const double c = to_HParams(base).c_tilde;
    row.c_tilde = c;
    row.type = c < 0.0 ? TangencyType::Inner : TangencyType::Outer;
    if (std::abs(c - 1.0) < 0.25)
        throw DetectionFailure("c tilde too close to 1: fold and pitchfork merge");
    const double F_pred = -0.25 * (c - 1.0) * (c - 1.0);
    const double PF_pred = 0.75 * (c - 1.0) * (c - 1.0);
    const double X_fold = (c - 1.0) / 2.0;

    // fold: existence of the symmetric pair near X_fold
    auto fold_f = [&](double Mt) {
        double v = 0.0;
        if (!fold_indicator(at(Mt), X_fold, v)) return 1.0;
        return v;
    };
    double lo = F_pred - opt.M_window, flo = fold_f(lo);
    double fold_Mt = std::nan("");
    for (double Mt = lo + opt.sweep_step; Mt <= F_pred + opt.M_window; Mt += opt.sweep_step) {
        const double fv = fold_f(Mt);
        if ((fv > 0) != (flo > 0)) {
            fold_Mt = bisect(base, fold_f, Mt - opt.sweep_step, Mt, flo, opt.M_tol);
            break;
        }
        flo = fv;
    }
    if (std::isnan(fold_Mt)) throw DetectionFailure("fold not found in the sweep window");
    row.M_fold = M_of_Mtilde(base, fold_Mt);
    {
        // the double root sits at the critical point of the diagonal equation
        const ReturnInstance r = at(fold_Mt);
        double v = 0.0, pc = 0.0;
        fold_indicator(r, X_fold, v, &pc);
        row.fold_trace = tkm_jacobian(tkm_equation(r), {pc, pc}, {pc, pc}).trace();
    }

    // pitchfork: trace of the branch that loses stability returns to +2
    const bool use_plus = c < 1.0;
    auto pf_f = [&](double Mt) {
        auto pts = tkm_symmetric_points(at(Mt));
        if (pts.size() < 2) return std::nan("");
        return (use_plus ? pts.front() : pts.back()).J.trace() - 2.0;
    };
    double start = fold_Mt + 0.05;
    double fprev = pf_f(start);
    double pf_Mt = std::nan("");
    for (double Mt = start + opt.sweep_step; Mt <= PF_pred + opt.M_window; Mt += opt.sweep_step) {
        const double fv = pf_f(Mt);
        if (std::isnan(fv) || std::isnan(fprev)) {
            fprev = fv;
            continue;
        }
        if ((fv > 0) != (fprev > 0)) {
            pf_Mt = bisect(base, pf_f, Mt - opt.sweep_step, Mt, fprev, opt.M_tol);
            break;
        }
        fprev = fv;
    }
    if (std::isnan(pf_Mt)) throw DetectionFailure("pitchfork not found in the sweep window");
    row.M_pf = M_of_Mtilde(base, pf_Mt);

    row.mu_fold = mu_of_M(at(fold_Mt));
    row.mu_pf = mu_of_M(at(pf_Mt));
    row.mu_fold_formula = mu_fold_formula(coeffs, k, m);
    row.mu_pf_formula = mu_pf_formula(coeffs, k, m);

    // the pair born at the pitchfork
    const AsymmetricPair pair = asymmetric_jacobians(at(pf_Mt + opt.pair_offset));
    row.J_plus = pair.J_plus;
    row.J_minus = pair.J_minus;
    row.kind_plus = to_string(pair.kind_plus);
    row.kind_minus = to_string(pair.kind_minus);

    if (row.type == TangencyType::Inner) {
        // multiplier -1 on the asymmetric branch: 1 + tr + det = 0
        auto pd_f = [&](double Mt) {
            try {
                const ReturnInstance r = at(Mt);
                const auto pr = asymmetric_jacobians(r);
                const Mat2 J = tkm_jacobian(tkm_equation(r), pr.plus, pr.plus);
                return 1.0 + J.trace() + J.determinant();
            } catch (const Error&) {
                return std::nan("");
            }
        };
        const double PD_pred = curve_M(CurveId::PDp34, c);
        double a = pf_Mt + 0.05, fa = pd_f(a);
        for (double Mt = a + opt.sweep_step; Mt <= PD_pred + opt.M_window; Mt += opt.sweep_step) {
            const double fv = pd_f(Mt);
            if (!std::isnan(fv) && !std::isnan(fa) && (fv > 0) != (fa > 0)) {
                const double pd = bisect(base, pd_f, Mt - opt.sweep_step, Mt, fa, opt.M_tol);
                row.mu_pd = mu_of_M(at(pd));
                break;
            }
            fa = fv;
        }
    }
    row.ok = true;
    return row;
}

} // namespace

CascadeReport cascade_scan(const GlobalMapCoeffs& coeffs, const std::vector<int>& k_list,
                           const MRule& m_rule, const CascadeOptions& opt) {
    coeffs.validate();
    CascadeReport rep;
    rep.coeffs = coeffs;
    rep.rows.resize(k_list.size());
    parallel_for(k_list.size(), opt.threads, [&](std::size_t i) {
        const int k = k_list[i];
        int m = 0;
        try {
            m = m_rule(coeffs, k);
            rep.rows[i] = scan_one(coeffs, k, m, opt);
        } catch (const Error& e) {
            CascadeRow r;
            r.k = k;
            r.m = m;
            r.failure = e.what();
            rep.rows[i] = r;
        }
    });
    return rep;
}

} // namespace revmap
