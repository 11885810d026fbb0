// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

using namespace revmap::cli;

namespace {

struct Ran {
    int code = 0;
    std::string out, err;
};

Ran cli(std::vector<std::string> args) {
    std::ostringstream o, e;
    const int code = run(args, o, e);
    return {code, o.str(), e.str()};
}

struct Csv {
    std::map<std::string, std::string> header; // "# key: value" lines, config lines keyed "config.k"
    std::vector<std::string> columns;
    std::vector<std::map<std::string, std::string>> rows;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> v;
    std::stringstream ss(s);
    std::string f;
    while (std::getline(ss, f, sep)) v.push_back(f);
    if (!s.empty() && s.back() == sep) v.emplace_back();
    return v;
}

Csv parse(const std::string& text) {
    Csv c;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (line.rfind("# config: ", 0) == 0) {
            const auto kv = line.substr(10);
            const auto eq = kv.find(" = ");
            c.header["config." + kv.substr(0, eq)] = kv.substr(eq + 3);
        } else if (line.rfind("# ", 0) == 0) {
            const auto colon = line.find(": ");
            if (colon != std::string::npos) c.header[line.substr(2, colon - 2)] = line.substr(colon + 2);
        } else if (c.columns.empty()) {
            c.columns = split(line, ',');
        } else if (!line.empty()) {
            const auto f = split(line, ',');
            std::map<std::string, std::string> r;
            for (std::size_t i = 0; i < f.size() && i < c.columns.size(); ++i) r[c.columns[i]] = f[i];
            c.rows.push_back(std::move(r));
        }
    }
    return c;
}

double num(const std::string& s) { return std::stod(s); }

std::filesystem::path scratch(const std::string& name) {
    const auto d = std::filesystem::temp_directory_path() / "revmap_cli_test";
    std::filesystem::create_directories(d);
    return d / name;
}

} // namespace

TEST(Format, ShortestRoundTrip) {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 1e300, 4.0}) EXPECT_EQ(std::stod(fmt_num(v)), v);
    EXPECT_EQ(fmt_num(4.0), "4");
    EXPECT_EQ(fmt_num(-1.0), "-1");
}

TEST(Config, ParsesSections) {
    const auto s = parse_config("seed = 3\n# comment\n[hmap]\nc = 2\n  M=  0.5 \n");
    EXPECT_EQ(s.at("").at("seed"), "3");
    EXPECT_EQ(s.at("hmap").at("c"), "2");
    EXPECT_EQ(s.at("hmap").at("M"), "0.5");
}

TEST(Hmap, FourFixedPointsAtMinusOneFour) {
    const Ran r = cli({"hmap", "--c", "-1", "--M", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Csv c = parse(r.out);
    ASSERT_EQ(c.rows.size(), 1u);
    const auto& row = c.rows[0];
    EXPECT_EQ(row.at("n_fixed"), "4");
    const std::set<std::pair<double, double>> pair{{num(row.at("x3")), num(row.at("y3"))},
                                                   {num(row.at("x4")), num(row.at("y4"))}};
    EXPECT_EQ(pair, (std::set<std::pair<double, double>>{{2, 0}, {0, 2}}));
}

TEST(Hmap, NoFixedPointsBelowFold) {
    const Csv c = parse(cli({"hmap", "--c", "-1", "--M", "-2"}).out);
    ASSERT_EQ(c.rows.size(), 1u);
    EXPECT_EQ(c.rows[0].at("n_fixed"), "0");
    EXPECT_EQ(c.rows[0].at("region"), "I_l");
}

TEST(Hmap, ScanJumpsOnlyAtFoldAndPitchfork) {
    const Ran r = cli({"hmap", "--c", "-1", "--scan-M", "-2:5:0.01"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Csv c = parse(r.out);
    ASSERT_GT(c.rows.size(), 690u);
    std::vector<double> jumps;
    for (std::size_t i = 1; i < c.rows.size(); ++i)
        if (c.rows[i].at("n_fixed") != c.rows[i - 1].at("n_fixed")) jumps.push_back(num(c.rows[i].at("M_tilde")));
    // the grid lands on M = -1 itself, where the census is a single parabolic point
    ASSERT_GE(jumps.size(), 2u);
    EXPECT_NEAR(jumps.front(), -1.0, 0.011);
    EXPECT_NEAR(jumps.back(), 3.0, 0.011);
    for (double M : jumps) EXPECT_TRUE(std::abs(M + 1) < 0.011 || std::abs(M - 3) < 0.011) << M;
}

TEST(Bifdiag, FoldCurveRowwise) {
    const Ran r = cli({"bifdiag", "--curves", "F1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Csv c = parse(r.out);
    ASSERT_EQ(c.rows.size(), 60u); // F1 lives on c_tilde < 0
    for (const auto& row : c.rows) {
        EXPECT_LT(num(row.at("c_tilde")), 0.0);
        const double ct = num(row.at("c_tilde")), Mt = num(row.at("M_tilde"));
        EXPECT_LT(std::abs(Mt + 0.25 * (ct - 1) * (ct - 1)), 1e-12) << ct;
        EXPECT_EQ(row.at("curve"), "F1");
    }
}

TEST(B1map, ZeroRowsVanish) {
    const Ran r = cli({"b1map", "--nc", "5", "--nM", "5", "--zero-n", "41"});
    ASSERT_EQ(r.code, 0) << r.err;
    int zeros = 0;
    for (const auto& row : parse(r.out).rows) {
        if (row.at("row") != "zero") continue;
        ++zeros;
        EXPECT_LT(std::abs(num(row.at("B1"))), 1e-9);
        // the zero lies on an elliptic point: psi strictly inside (0, pi)
        const double psi = num(row.at("psi"));
        EXPECT_GT(psi, 0.0);
        EXPECT_LT(psi, 3.14159265358979);
    }
    EXPECT_GT(zeros, 10);
}

TEST(Cascade, ErrorsShrink) {
    const Ran r = cli({"cascade", "--k", "8..12"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Csv c = parse(r.out);
    ASSERT_EQ(c.rows.size(), 5u);
    double prev = 1.0;
    for (const auto& row : c.rows) {
        EXPECT_EQ(row.at("status"), "ok");
        const double e = std::abs(num(row.at("mu_fold_detected")) / num(row.at("mu_fold_formula")) - 1.0);
        EXPECT_LT(e, prev);
        prev = e;
    }
    const Csv list = parse(cli({"cascade", "--k", "9,11"}).out);
    ASSERT_EQ(list.rows.size(), 2u);
    EXPECT_EQ(list.rows[1].at("k"), "11");
}

TEST(Melnikov, ConstantPartIsTwo) {
    const Ran r = cli({"melnikov", "--n", "8"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Csv c = parse(r.out);
    ASSERT_EQ(c.rows.size(), 8u);
    for (const auto& row : c.rows) {
        EXPECT_NEAR(num(row.at("constant")), 2.0, 1e-10);
        EXPECT_EQ(row.at("splitting"), "disjoint");
    }
    const Csv strong = parse(cli({"melnikov", "--beta", "3", "--n", "8"}).out);
    EXPECT_EQ(strong.rows[0].at("splitting"), "intersect");
}

TEST(Rotators, FoldNearQuotedValue) {
    const Ran r = cli({"rotators", "fold"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Csv c = parse(r.out);
    ASSERT_EQ(c.rows.size(), 1u);
    const double e = num(c.rows[0].at("eps_star"));
    EXPECT_GE(e, 0.435);
    EXPECT_LE(e, 0.455);
}

TEST(Rotators, PoincareOrbitLength) {
    const Csv c = parse(cli({"rotators", "poincare", "--n", "5", "--eps", "0"}).out);
    ASSERT_EQ(c.rows.size(), 6u);
    EXPECT_NEAR(num(c.rows[2].at("eta")), 0.5, 1e-9); // two half turns
}

TEST(Check, FastSuitePasses) {
    const Ran r = cli({"check", "--rotators", "no"});
    EXPECT_EQ(r.code, 0) << r.err;
    const Csv c = parse(r.out);
    ASSERT_GE(c.rows.size(), 10u);
    for (const auto& row : c.rows) EXPECT_EQ(row.at("pass"), "pass") << row.at("invariant");
}

TEST(Header, EchoesConfig) {
    const Ran r = cli({"melnikov", "--n", "4", "--omega", "2", "--seed", "9"});
    const Csv c = parse(r.out);
    EXPECT_EQ(r.out.rfind("# revmap melnikov\n", 0), 0u);
    EXPECT_EQ(c.header.at("version"), "0.3.0");
    EXPECT_EQ(c.header.at("seed"), "9");
    EXPECT_EQ(c.header.at("config_hash").rfind("fnv1a:", 0), 0u);
    for (const char* k : {"alpha", "beta", "omega", "n", "T", "tol", "seed", "threads"})
        EXPECT_TRUE(c.header.count(std::string("config.") + k)) << k;
    EXPECT_EQ(c.header.at("config.omega"), "2");
    EXPECT_EQ(c.header.at("config.alpha"), "1");
    // the hash follows the config
    const Csv d = parse(cli({"melnikov", "--n", "4", "--omega", "3", "--seed", "9"}).out);
    EXPECT_NE(d.header.at("config_hash"), c.header.at("config_hash"));
}

TEST(ExitCodes, UsageErrors) {
    const Ran zero = cli({"hmap", "--c", "0"});
    EXPECT_EQ(zero.code, 2);
    EXPECT_NE(zero.err.find("c must be nonzero"), std::string::npos);
    EXPECT_EQ(cli({"hmap", "--bogus", "1"}).code, 2);
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({"hmap", "--M", "abc"}).code, 2);
    EXPECT_EQ(cli({"melnikov", "--n", "2"}).code, 2);
    EXPECT_EQ(cli({"hmap", "--config", scratch("missing.cfg").string()}).code, 2);
    EXPECT_EQ(cli({"hmap", "--c", "-1", "--M", "4"}).code, 0);
}

TEST(Config, FileThenFlags) {
    const auto path = scratch("layers.cfg");
    {
        std::ofstream f(path);
        f << "seed = 5\nunrelated = 1\n[hmap]\nc = 2\nM = 0.5\n";
    }
    const Csv a = parse(cli({"hmap", "--config", path.string()}).out);
    EXPECT_EQ(a.header.at("config.c"), "2");
    EXPECT_EQ(a.header.at("config.M"), "0.5");
    EXPECT_EQ(a.header.at("seed"), "5");
    EXPECT_FALSE(a.header.count("config.unrelated"));
    const Csv b = parse(cli({"hmap", "--config", path.string(), "--M", "1"}).out);
    EXPECT_EQ(b.header.at("config.c"), "2");
    EXPECT_EQ(b.header.at("config.M"), "1");
    {
        std::ofstream f(path);
        f << "[hmap]\nbogus = 1\n";
    }
    EXPECT_EQ(cli({"hmap", "--config", path.string()}).code, 2);
}

TEST(Output, FilesAndJsonMirror) {
    const auto path = scratch("hmap.csv");
    std::filesystem::remove(path);
    const Ran r = cli({"hmap", "--out", path.string(), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    const Csv c = parse(ss.str());
    EXPECT_EQ(c.rows.at(0).at("n_fixed"), "4");
    EXPECT_FALSE(c.header.count("config.out"));

    const auto j = nlohmann::json::parse(cli({"hmap", "--json"}).out);
    EXPECT_EQ(j.at("subcommand"), "hmap");
    EXPECT_EQ(j.at("config").at("M"), "4");
    EXPECT_EQ(j.at("rows").at(0).at(2).get<double>(), 4.0);
    EXPECT_EQ(j.at("config_hash"), c.header.at("config_hash"));
}

TEST(Determinism, RepeatedRunsAreByteIdentical) {
    const std::vector<std::vector<std::string>> runs{
        {"hmap", "--scan-M", "-2:5:0.25"},
        {"bifdiag", "--n", "11"},
        {"b1map", "--nc", "5", "--nM", "5", "--zero-n", "21"},
        {"cascade", "--k", "8..10"},
        {"melnikov", "--n", "8"},
        {"rotators", "measure", "--samples", "30", "--steps", "20", "--burn", "5", "--bins", "8"},
        {"check", "--rotators", "no", "--samples", "50"}};
    for (const auto& a : runs) {
        const Ran x = cli(a), y = cli(a);
        EXPECT_EQ(x.code, 0) << a[0] << ": " << x.err;
        EXPECT_EQ(x.out, y.out) << a[0];
    }
}

TEST(Determinism, ThreadCountOnlyChangesItsEcho) {
    auto data = [](const std::string& s) {
        std::string d;
        std::stringstream ss(s);
        std::string line;
        while (std::getline(ss, line))
            if (line.rfind("# ", 0) != 0) d += line + "\n";
        return d;
    };
    for (std::vector<std::string> a : {std::vector<std::string>{"cascade", "--k", "8..11"},
                                       {"rotators", "measure", "--samples", "30", "--steps", "20", "--burn", "5",
                                        "--bins", "8"}}) {
        auto b = a;
        a.insert(a.end(), {"--threads", "1"});
        b.insert(b.end(), {"--threads", "2"});
        EXPECT_EQ(data(cli(a).out), data(cli(b).out)) << a[0];
    }
}
