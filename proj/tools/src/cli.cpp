// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"
#include "checks.hpp"

#include "revmap/birkhoff.hpp"
#include "revmap/errors.hpp"
#include "revmap/firstreturn.hpp"
#include "revmap/hmap.hpp"
#include "revmap/melnikov.hpp"
#include "revmap/rotators.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#ifndef REVMAP_VERSION
#define REVMAP_VERSION "0.0.0"
#endif

namespace revmap::cli {

void ResultTable::add_row(std::vector<std::string> row) {
    if (row.size() != columns.size())
        throw std::logic_error("row has " + std::to_string(row.size()) + " cells, table has " +
                               std::to_string(columns.size()) + " columns");
    rows.push_back(std::move(row));
}

std::string fmt_num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string fmt_num(long long v) { return std::to_string(v); }

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_dump(const RunConfig& cfg) {
    std::string s;
    for (const auto& [k, v] : cfg) s += k + "=" + v + "\n";
    return s;
}

namespace {

std::string trim(std::string_view s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string_view::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return std::string(s.substr(a, b - a + 1));
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace

std::map<std::string, RunConfig> parse_config(std::string_view text) {
    std::map<std::string, RunConfig> out;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw UsageError("config line " + std::to_string(lineno) + ": bad section");
            section = trim(std::string_view(t).substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string k = trim(std::string_view(t).substr(0, eq));
        if (k.empty()) throw UsageError("config line " + std::to_string(lineno) + ": empty key");
        out[section][k] = trim(std::string_view(t).substr(eq + 1));
    }
    return out;
}

namespace {

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"') q += '"';
        q += ch;
    }
    return q + "\"";
}

} // namespace

void write_csv(std::ostream& os, const std::string& subcommand, const RunConfig& cfg,
               const ResultTable& t) {
    os << "# revmap " << subcommand << "\n";
    os << "# version: " << REVMAP_VERSION << "\n";
    os << "# seed: " << (cfg.count("seed") ? cfg.at("seed") : "none") << "\n";
    os << "# config_hash: fnv1a:" << hex64(fnv1a(config_dump(cfg))) << "\n";
    for (const auto& [k, v] : cfg) os << "# config: " << k << " = " << v << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << csv_cell(t.columns[i]);
    os << "\n";
    for (const auto& r : t.rows) {
        for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_cell(r[i]);
        os << "\n";
    }
}

void write_json(std::ostream& os, const std::string& subcommand, const RunConfig& cfg,
                const ResultTable& t) {
    using nlohmann::ordered_json;
    ordered_json j;
    j["subcommand"] = subcommand;
    j["version"] = REVMAP_VERSION;
    j["seed"] = cfg.count("seed") ? cfg.at("seed") : "none";
    j["config_hash"] = "fnv1a:" + hex64(fnv1a(config_dump(cfg)));
    j["config"] = ordered_json::object();
    for (const auto& [k, v] : cfg) j["config"][k] = v;
    j["columns"] = t.columns;
    j["rows"] = ordered_json::array();
    for (const auto& r : t.rows) {
        ordered_json row = ordered_json::array();
        for (const auto& cell : r) {
            double v = 0.0;
            auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec == std::errc{} && p == cell.data() + cell.size() && !cell.empty()) {
                if (std::isfinite(v))
                    row.push_back(v);
                else
                    row.push_back(nullptr);
            } else {
                row.push_back(cell);
            }
        }
        j["rows"].push_back(std::move(row));
    }
    os << j.dump(1) << "\n";
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------- config access

double num(const RunConfig& c, const std::string& k) {
    const std::string& s = c.at(k);
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v))
        throw UsageError(k + ": not a finite number: '" + s + "'");
    return v;
}

long long integer(const RunConfig& c, const std::string& k) {
    const std::string& s = c.at(k);
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw UsageError(k + ": not an integer: '" + s + "'");
    return v;
}

long long positive(const RunConfig& c, const std::string& k) {
    const long long v = integer(c, k);
    if (v < 1) throw UsageError(k + " must be at least 1");
    return v;
}

std::uint64_t seed_of(const RunConfig& c) {
    const std::string& s = c.at("seed");
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw UsageError("seed: not a u64: '" + s + "'");
    return v;
}

double tol_of(const RunConfig& c) {
    const double t = num(c, "tol");
    if (!(t > 0.0)) throw UsageError("tol must be positive");
    return t;
}

// "8,9,10" or "8..14"
std::vector<int> int_list(const std::string& key, const std::string& s) {
    std::vector<int> out;
    if (const auto dots = s.find(".."); dots != std::string::npos) {
        RunConfig tmp{{"lo", s.substr(0, dots)}, {"hi", s.substr(dots + 2)}};
        const long long lo = integer(tmp, "lo"), hi = integer(tmp, "hi");
        if (hi < lo) throw UsageError(key + ": empty range");
        for (long long k = lo; k <= hi; ++k) out.push_back(static_cast<int>(k));
        return out;
    }
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        RunConfig tmp{{key, trim(item)}};
        out.push_back(static_cast<int>(integer(tmp, key)));
    }
    if (out.empty()) throw UsageError(key + ": empty list");
    return out;
}

// "lo:hi:step", endpoints included
std::vector<double> scan_range(const std::string& key, const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(trim(item));
    if (parts.size() != 3) throw UsageError(key + ": expected lo:hi:step");
    RunConfig tmp{{"lo", parts[0]}, {"hi", parts[1]}, {"step", parts[2]}};
    const double lo = num(tmp, "lo"), hi = num(tmp, "hi"), step = num(tmp, "step");
    if (!(step > 0.0) || hi < lo) throw UsageError(key + ": need lo <= hi and step > 0");
    const long long n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    if (n > 10'000'000) throw UsageError(key + ": too many points");
    std::vector<double> out;
    for (long long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
}

std::vector<double> linspace(double lo, double hi, long long n) {
    std::vector<double> out;
    for (long long i = 0; i < n; ++i)
        out.push_back(n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return out;
}

std::string join(const std::vector<std::string>& v, const char* sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
    return s;
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }
const std::string kNaN = "nan";

// ------------------------------------------------------------------ commands

struct Key {
    std::string name, def, help;
};

struct Output {
    ResultTable table;
    int status = 0;
    // extra tables written next to the main output, keyed by file suffix
    std::vector<std::pair<std::string, ResultTable>> side;
};

struct Command {
    std::string name; // "rotators.measure" for nested commands
    std::string help;
    std::vector<Key> keys;
    std::function<Output(const RunConfig&)> body;
};

Output cmd_hmap(const RunConfig& cfg) {
    const double c = num(cfg, "c");
    if (c == 0.0) throw UsageError("c must be nonzero");
    const std::vector<double> Ms =
        cfg.at("scan-M").empty() ? std::vector<double>{num(cfg, "M")} : scan_range("scan-M", cfg.at("scan-M"));
    Output o;
    o.table.columns = {"c_tilde", "M_tilde", "n_fixed", "region", "p_plus", "p_minus",
                       "x3",      "y3",      "x4",      "y4",     "kinds"};
    for (double M : Ms) {
        const HParams h{c, M};
        const auto fps = all_fixed_points(h);
        std::string region;
        try {
            region = classify_region(h).label;
        } catch (const OnCurve&) {
            region = "on_curve";
        }
        std::vector<std::string> sym, asym, kinds;
        for (const auto& fp : fps) {
            kinds.push_back(kind_label(fp));
            if (fp.symmetric)
                sym.push_back(fmt_num(fp.location.x));
            else {
                asym.push_back(fmt_num(fp.location.x));
                asym.push_back(fmt_num(fp.location.y));
            }
        }
        sym.resize(2, kNaN);
        asym.resize(4, kNaN);
        o.table.add_row({fmt_num(c), fmt_num(M), fmt_num(static_cast<long long>(fps.size())), region, sym[0],
                         sym[1], asym[0], asym[1], asym[2], asym[3], join(kinds, ";")});
    }
    return o;
}

std::vector<CurveId> curve_list(const std::string& s) {
    const auto all = all_curves();
    if (s == "all") return all;
    std::vector<CurveId> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        bool found = false;
        for (CurveId id : all)
            if (to_string(id) == item) {
                out.push_back(id);
                found = true;
            }
        if (!found) throw UsageError("curves: unknown curve '" + item + "'");
    }
    return out;
}

Output cmd_bifdiag(const RunConfig& cfg) {
    const double lo = num(cfg, "c-lo"), hi = num(cfg, "c-hi");
    const long long n = positive(cfg, "n");
    if (!(lo < hi)) throw UsageError("need c-lo < c-hi");
    const auto grid = linspace(lo, hi, n);
    Output o;
    o.table.columns = {"curve", "branch", "c_tilde", "M_tilde", "trace"};
    for (CurveId id : curve_list(cfg.at("curves"))) {
        std::vector<double> cs;
        for (double c : grid)
            if (c != 0.0 && curve_domain_ok(id, c)) cs.push_back(c);
        for (const auto& s : bif_curve(id, cs))
            o.table.add_row({to_string(id), fmt_num(static_cast<long long>(s.branch)), fmt_num(s.c_tilde),
                             fmt_num(s.M_tilde), fmt_num(curve_trace(id))});
    }
    return o;
}

std::vector<Which> branches(const std::string& s) {
    if (s == "plus") return {Which::Plus};
    if (s == "minus") return {Which::Minus};
    if (s == "both") return {Which::Plus, Which::Minus};
    throw UsageError("branch must be plus, minus or both");
}

Output cmd_b1map(const RunConfig& cfg) {
    const double clo = num(cfg, "c-lo"), chi = num(cfg, "c-hi");
    const double Mlo = num(cfg, "M-lo"), Mhi = num(cfg, "M-hi");
    const long long nc = positive(cfg, "nc"), nM = positive(cfg, "nM"), nz = positive(cfg, "zero-n");
    const double guard = num(cfg, "resonance-guard");
    if (!(clo < chi) || !(Mlo < Mhi)) throw UsageError("empty grid range");
    const auto ws = branches(cfg.at("branch"));
    Output o;
    o.table.columns = {"row", "branch", "c_tilde", "M_tilde", "p", "psi", "B1"};
    auto bname = [](Which w) { return std::string(w == Which::Plus ? "plus" : "minus"); };
    for (double c : linspace(clo, chi, nc)) {
        if (c == 0.0) continue;
        for (double M : linspace(Mlo, Mhi, nM))
            for (Which w : ws) {
                const double s = c - 1.0;
                if (s * s + 4.0 * M < 0.0) continue;
                const double p = p_of({c, M}, w);
                const double co = symmetric_trace(c, p) / 2.0;
                if (!(std::abs(co) < 1.0)) continue;
                const double psi = std::acos(co);
                if (!resonance_guard(psi, guard).ok) continue;
                o.table.add_row({"grid", bname(w), fmt_num(c), fmt_num(M), fmt_num(p), fmt_num(psi),
                                 fmt_num(b1_closed_form(c, p))});
            }
    }
    std::vector<double> zc;
    for (double c : linspace(clo, chi, nz))
        if (c != 0.0) zc.push_back(c);
    for (Which w : ws)
        for (const auto& z : b1_zero_curves(zc, w))
            o.table.add_row({"zero", bname(w), fmt_num(z.c_tilde), fmt_num(z.M_tilde), fmt_num(z.p),
                             fmt_num(std::acos(symmetric_trace(z.c_tilde, z.p) / 2.0)),
                             fmt_num(b1_closed_form(z.c_tilde, z.p))});
    return o;
}

Output cmd_cascade(const RunConfig& cfg) {
    GlobalMapCoeffs g;
    g.a = num(cfg, "a");
    g.b = num(cfg, "b");
    g.c = num(cfg, "c");
    g.d = num(cfg, "d");
    g.f11 = num(cfg, "f11");
    g.f03 = num(cfg, "f03");
    g.l02 = num(cfg, "l02");
    g.alpha1 = num(cfg, "alpha1");
    g.alpha2 = num(cfg, "alpha2");
    g.lambda1 = num(cfg, "lambda1");
    g.lambda2 = num(cfg, "lambda2");
    g.validate();
    const auto ks = int_list("k", cfg.at("k"));
    for (int k : ks)
        if (k < 1) throw UsageError("k must be positive");
    CascadeOptions opt;
    opt.M_tol = tol_of(cfg);
    opt.threads = static_cast<int>(positive(cfg, "threads"));
    const auto rep = cascade_scan(g, ks, balanced_m, opt);
    Output o;
    o.table.columns = {"k",           "m",       "mu_fold_detected", "mu_fold_formula", "mu_pf_detected",
                       "mu_pf_formula", "tangency_type", "J_plus",   "J_minus",         "mu_pd_detected",
                       "kind_plus",   "kind_minus", "status"};
    for (const auto& r : rep.rows) {
        auto v = [&](double x) { return r.ok ? fmt_num(x) : kNaN; };
        o.table.add_row({fmt_num(static_cast<long long>(r.k)), fmt_num(static_cast<long long>(r.m)),
                         v(r.mu_fold), fmt_num(r.mu_fold_formula), v(r.mu_pf), fmt_num(r.mu_pf_formula),
                         to_string(r.type), v(r.J_plus), v(r.J_minus),
                         r.ok && r.mu_pd ? fmt_num(*r.mu_pd) : kNaN, r.ok ? r.kind_plus : "",
                         r.ok ? r.kind_minus : "", r.ok ? "ok" : r.failure});
    }
    return o;
}

Output cmd_melnikov(const RunConfig& cfg) {
    DuffingParams p;
    p.alpha = num(cfg, "alpha");
    p.beta = num(cfg, "beta");
    p.omega = num(cfg, "omega");
    if (!(p.omega > 0.0)) throw UsageError("omega must be positive");
    const long long n = positive(cfg, "n");
    if (n < 4) throw UsageError("n must be at least 4");
    const double T = num(cfg, "T");
    const double tol = tol_of(cfg);
    const MelnikovProfile prof = melnikov_profile(p, static_cast<int>(n));
    const double th = tangency_threshold(p.omega);
    const std::string split = p.alpha == 0.0 ? "degenerate_alpha" : to_string(classify_splitting(p));
    Output o;
    o.table.columns = {"t0",       "M_quadrature", "M_fit",     "threshold", "P_omega_reference",
                       "constant", "amplitude",    "splitting", "I1_reading"};
    const std::string i1 = "I1=" + fmt_num(I1_quadrature(T)) + " (2sqrt2 by quadrature)";
    for (std::size_t i = 0; i < prof.t0.size(); ++i) {
        const double t0 = prof.t0[i];
        o.table.add_row({fmt_num(t0), fmt_num(melnikov_quadrature(p, t0, T, tol)), fmt_num(prof.fit(t0)),
                         fmt_num(th), fmt_num(reference_P(p.omega)), fmt_num(prof.constant_part),
                         fmt_num(prof.amplitude), split, i1});
    }
    return o;
}

double rotator_eps(const RunConfig& cfg) {
    const double e = num(cfg, "eps");
    if (!(std::abs(e) < 2.0)) throw UsageError("|eps| must be below 2");
    return e;
}

PTOptions ode_of(const RunConfig& cfg) {
    const double t = tol_of(cfg);
    return {t, t * 1e-2};
}

Output cmd_poincare(const RunConfig& cfg) {
    PoincareSection sec;
    sec.epsilon = rotator_eps(cfg);
    sec.from_rho = num(cfg, "from");
    sec.to_rho = num(cfg, "to");
    if (sec.from_rho == sec.to_rho) throw UsageError("from and to must differ");
    sec.ode = ode_of(cfg);
    const long long n = integer(cfg, "n");
    if (n < 0) throw UsageError("n must be non-negative");
    Point2 z{wrap_angle(num(cfg, "xi")), wrap_angle(num(cfg, "eta"))};
    Output o;
    o.table.columns = {"step", "xi", "eta"};
    o.table.add_row({"0", fmt_num(z.x), fmt_num(z.y)});
    for (long long i = 1; i <= n; ++i) {
        z = poincare_map(sec, z);
        o.table.add_row({fmt_num(i), fmt_num(z.x), fmt_num(z.y)});
    }
    return o;
}

Output cmd_orbits(const RunConfig& cfg) {
    const double eps = rotator_eps(cfg);
    const long long n = positive(cfg, "period");
    const long long grid = positive(cfg, "grid");
    const auto orbits = find_periodic(eps, static_cast<int>(n), {}, ode_of(cfg), static_cast<int>(grid));
    Output o;
    o.table.columns = {"orbit", "index",     "xi",        "eta",       "symmetric", "kind",
                       "det",   "trace",     "root_label", "root_kind", "root_det"};
    for (std::size_t k = 0; k < orbits.size(); ++k) {
        const auto& orb = orbits[k];
        for (std::size_t i = 0; i < orb.points.size(); ++i)
            o.table.add_row({fmt_num(static_cast<long long>(k)), fmt_num(static_cast<long long>(i)),
                             fmt_num(orb.points[i].x), fmt_num(orb.points[i].y), yes_no(orb.symmetric),
                             to_string(orb.record.kind), fmt_num(orb.record.jac_det), fmt_num(orb.record.trace()),
                             orb.root_label, to_string(orb.root_record.kind), fmt_num(orb.root_record.jac_det)});
    }
    return o;
}

Output cmd_fold(const RunConfig& cfg) {
    const double lo = num(cfg, "lo"), hi = num(cfg, "hi");
    const long long n = positive(cfg, "period");
    if (n % 2 == 0) throw UsageError("period must be odd");
    if (!(lo < hi) || !(hi < 2.0) || !(lo > -2.0)) throw UsageError("need -2 < lo < hi < 2");
    const FoldResult f = fold_locate(static_cast<int>(n), lo, hi, tol_of(cfg));
    Output o;
    o.table.columns = {"eps_star", "interval", "xi", "eta", "mult1_re", "mult1_im", "mult2_re", "mult2_im"};
    o.table.add_row({fmt_num(f.eps_star), fmt_num(f.interval), fmt_num(f.point.x), fmt_num(f.point.y),
                     fmt_num(f.multipliers[0].real()), fmt_num(f.multipliers[0].imag()),
                     fmt_num(f.multipliers[1].real()), fmt_num(f.multipliers[1].imag())});
    return o;
}

Output cmd_measure(const RunConfig& cfg) {
    MeasureOptions m;
    const double eps = rotator_eps(cfg);
    m.n_samples = static_cast<int>(positive(cfg, "samples"));
    m.n_steps = static_cast<int>(positive(cfg, "steps"));
    m.burn_in = static_cast<int>(integer(cfg, "burn"));
    if (m.burn_in < 0 || m.burn_in >= m.n_steps) throw UsageError("need 0 <= burn < steps");
    m.bins = static_cast<int>(positive(cfg, "bins"));
    m.seed = seed_of(cfg);
    m.threads = static_cast<int>(positive(cfg, "threads"));
    m.ode = ode_of(cfg);
    const MeasurePair r = measure_pair(eps, m);
    Output o;
    o.table.columns = {"eps", "samples", "steps", "bins", "dropped", "asymmetry", "reflected_distance"};
    o.table.add_row({fmt_num(eps), fmt_num(static_cast<long long>(r.n_samples)),
                     fmt_num(static_cast<long long>(r.n_iterations)), fmt_num(static_cast<long long>(m.bins)),
                     fmt_num(static_cast<long long>(r.dropped)), fmt_num(r.asymmetry),
                     fmt_num(r.reflected_distance)});
    ResultTable h;
    h.columns = {"i", "j", "xi_lo", "eta_lo", "forward", "backward"};
    const double w = kTwoPi / m.bins;
    for (int i = 0; i < m.bins; ++i)
        for (int j = 0; j < m.bins; ++j) {
            const auto f = r.forward_hist.counts[i * m.bins + j], b = r.backward_hist.counts[i * m.bins + j];
            if (f == 0 && b == 0) continue;
            h.add_row({fmt_num(static_cast<long long>(i)), fmt_num(static_cast<long long>(j)), fmt_num(i * w),
                       fmt_num(j * w), std::to_string(f), std::to_string(b)});
        }
    o.side.emplace_back("hist", std::move(h));
    return o;
}

Output cmd_check(const RunConfig& cfg) {
    CheckOptions co;
    co.seed = seed_of(cfg);
    co.samples = static_cast<int>(positive(cfg, "samples"));
    co.with_rotators = cfg.at("rotators") != "no";
    Output o;
    o.table.columns = {"invariant", "value", "threshold", "pass"};
    for (const auto& r : run_checks(co)) {
        o.table.add_row({r.name, fmt_num(r.value), fmt_num(r.threshold), r.pass ? "pass" : "FAIL"});
        if (!r.pass) o.status = 1;
    }
    return o;
}

std::vector<Command> commands() {
    const std::string two_pi = fmt_num(kTwoPi);
    std::vector<Command> v;
    v.push_back({"hmap",
                 "fixed points and region of H",
                 {{"c", "-1", "c_tilde"}, {"M", "4", "M_tilde"}, {"scan-M", "", "lo:hi:step scan in M_tilde"},
                  {"tol", "1e-12", "unused"}},
                 cmd_hmap});
    v.push_back({"bifdiag",
                 "sampled bifurcation curves",
                 {{"c-lo", "-3", ""}, {"c-hi", "3", ""}, {"n", "121", "grid size in c_tilde"},
                  {"curves", "all", "comma list of curve names"}, {"tol", "1e-12", "unused"}},
                 cmd_bifdiag});
    v.push_back({"b1map",
                 "first Birkhoff coefficient and its zero curves",
                 {{"c-lo", "-3", ""}, {"c-hi", "3", ""}, {"nc", "41", ""}, {"M-lo", "-2", ""}, {"M-hi", "6", ""},
                  {"nM", "41", ""}, {"branch", "both", "plus, minus or both"}, {"zero-n", "401", "c grid of zero curves"},
                  {"resonance-guard", "0.05", "excluded band around strong resonances"}, {"tol", "1e-12", "unused"}},
                 cmd_b1map});
    v.push_back({"cascade",
                 "fold, pitchfork and period doubling of T_km",
                 {{"a", "1", ""}, {"b", "1", ""}, {"c", "-1", ""}, {"d", "1", ""}, {"f11", "0.3", ""}, {"f03", "0.1", ""},
                  {"l02", "0.2", ""}, {"alpha1", "1", ""}, {"alpha2", "1", ""}, {"lambda1", "0.6", ""},
                  {"lambda2", "0.6", ""}, {"k", "8..14", "list or range of k"}, {"tol", "1e-10", "bisection tol in M"}},
                 cmd_cascade});
    v.push_back({"melnikov",
                 "Melnikov function of the perturbed Duffing equation",
                 {{"alpha", "1", ""}, {"beta", "0", ""}, {"omega", "1", ""}, {"n", "64", "samples of t0"},
                  {"T", "40", "half-length of the integration window"}, {"tol", "1e-12", "quadrature tol"}},
                 cmd_melnikov});
    v.push_back({"rotators.poincare",
                 "orbit of a Poincare map",
                 {{"eps", "0.3", ""}, {"xi", "1", ""}, {"eta", "0.5", ""}, {"n", "100", "iterations"},
                  {"from", "0", "start section"}, {"to", two_pi, "end section"}, {"tol", "1e-10", "ODE rtol"}},
                 cmd_poincare});
    v.push_back({"rotators.orbits",
                 "periodic orbits of the full map",
                 {{"eps", "0.46", ""}, {"period", "3", ""}, {"grid", "12", "seed grid"}, {"tol", "1e-10", "ODE rtol"}},
                 cmd_orbits});
    v.push_back({"rotators.fold",
                 "birth of symmetric periodic orbits",
                 {{"lo", "0.40", ""}, {"hi", "0.46", ""}, {"period", "3", ""}, {"tol", "1e-8", "bisection tol"}},
                 cmd_fold});
    v.push_back({"rotators.measure",
                 "forward and backward measure iteration",
                 {{"eps", "0.3", ""}, {"samples", "10000", ""}, {"steps", "1000", ""}, {"burn", "200", ""},
                  {"bins", "128", ""}, {"tol", "1e-8", "ODE rtol"}},
                 cmd_measure});
    v.push_back({"check",
                 "invariant suite",
                 {{"samples", "200", "random points per invariant"}, {"rotators", "yes", "include the ODE checks"},
                  {"tol", "1e-12", "unused"}},
                 cmd_check});
    return v;
}

// keys that only route I/O and do not enter the echoed config
const std::set<std::string> kIoKeys = {"out"};

std::string default_threads_str() { return std::to_string(default_threads()); }

std::string json_path(const std::string& out) {
    if (out.size() > 4 && out.substr(out.size() - 4) == ".csv") return out.substr(0, out.size() - 4) + ".json";
    return out + ".json";
}

std::string side_path(const std::string& out, const std::string& suffix) {
    if (out.size() > 4 && out.substr(out.size() - 4) == ".csv")
        return out.substr(0, out.size() - 4) + "." + suffix + ".csv";
    return out + "." + suffix + ".csv";
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& f) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UsageError("cannot open " + path);
    f(os);
    if (!os) throw UsageError("write failed: " + path);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    const auto cmds = commands();
    CLI::App app{"revmap: reversible maps, heteroclinic tangencies and mixed dynamics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", REVMAP_VERSION);

    struct Bound {
        CLI::App* sub = nullptr;
        std::map<std::string, std::string> values;
        std::map<std::string, CLI::Option*> opts;
        std::string config_path, out_path;
        bool json = false;
    };
    std::vector<std::unique_ptr<Bound>> bound;
    CLI::App* rot = app.add_subcommand("rotators", "three coupled rotators");
    rot->require_subcommand(1);
    for (const auto& c : cmds) {
        auto b = std::make_unique<Bound>();
        const auto dot = c.name.find('.');
        b->sub = dot == std::string::npos ? app.add_subcommand(c.name, c.help)
                                          : rot->add_subcommand(c.name.substr(dot + 1), c.help);
        b->sub->add_option("--config", b->config_path, "config file");
        b->sub->add_option("--out", b->out_path, "output CSV path (stdout if omitted)");
        b->sub->add_flag("--json", b->json, "also write a JSON mirror");
        std::vector<Key> keys = c.keys;
        keys.push_back({"seed", "1", "RNG seed"});
        keys.push_back({"threads", default_threads_str(), "worker threads (REVMAP_THREADS)"});
        for (const auto& k : keys) b->opts[k.name] = b->sub->add_option("--" + k.name, b->values[k.name], k.help);
        bound.push_back(std::move(b));
    }

    std::vector<const char*> argv{"revmap"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    std::size_t which = cmds.size();
    for (std::size_t i = 0; i < cmds.size(); ++i)
        if (bound[i]->sub->parsed()) which = i;
    if (which == cmds.size()) {
        err << "no subcommand\n";
        return 2;
    }
    const Command& cmd = cmds[which];
    Bound& b = *bound[which];
    const std::string label = [&] {
        std::string s = cmd.name;
        if (const auto d = s.find('.'); d != std::string::npos) s[d] = ' ';
        return s;
    }();

    try {
        // defaults, then the config file, then flags
        RunConfig cfg;
        std::vector<Key> keys = cmd.keys;
        keys.push_back({"seed", "1", ""});
        keys.push_back({"threads", default_threads_str(), ""});
        for (const auto& k : keys) cfg[k.name] = k.def;
        std::string out_path = b.out_path;
        if (!b.config_path.empty()) {
            std::ifstream in(b.config_path, std::ios::binary);
            if (!in) throw UsageError("cannot read config " + b.config_path);
            std::stringstream ss;
            ss << in.rdbuf();
            const auto sections = parse_config(ss.str());
            std::vector<std::string> names{""};
            if (const auto d = cmd.name.find('.'); d != std::string::npos) names.push_back(cmd.name.substr(0, d));
            names.push_back(cmd.name);
            names.push_back(label);
            for (const auto& sname : names) {
                auto it = sections.find(sname);
                if (it == sections.end()) continue;
                for (const auto& [k, v] : it->second) {
                    if (k == "out") {
                        if (b.out_path.empty()) out_path = v;
                        continue;
                    }
                    if (!cfg.count(k)) {
                        // unknown keys are tolerated only outside sections
                        if (sname.empty()) continue;
                        throw UsageError("config: unknown key '" + k + "' in [" + sname + "]");
                    }
                    cfg[k] = v;
                }
            }
        }
        for (const auto& [k, opt] : b.opts)
            if (opt->count() > 0) cfg[k] = b.values[k];
        seed_of(cfg);
        positive(cfg, "threads");
        for (const auto& k : kIoKeys) cfg.erase(k);

        Output res = cmd.body(cfg);
        if (out_path.empty()) {
            if (b.json)
                write_json(out, label, cfg, res.table);
            else
                write_csv(out, label, cfg, res.table);
        } else {
            write_file(out_path, [&](std::ostream& os) { write_csv(os, label, cfg, res.table); });
            if (b.json)
                write_file(json_path(out_path), [&](std::ostream& os) { write_json(os, label, cfg, res.table); });
            for (const auto& [suffix, t] : res.side)
                write_file(side_path(out_path, suffix),
                           [&](std::ostream& os) { write_csv(os, label + " " + suffix, cfg, t); });
        }
        if (res.status != 0) {
            err << "check failed:";
            for (const auto& r : res.table.rows)
                if (r.back() == "FAIL") err << " " << r.front();
            err << "\n";
        }
        return res.status;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const revmap::Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace revmap::cli
