// SPDX-License-Identifier: Apache-2.0
#include "revmap/birkhoff.hpp"
#include "revmap/firstreturn.hpp"
#include "revmap/hmap.hpp"
#include "revmap/melnikov.hpp"
#include "revmap/rotators.hpp"
#include "revmap/saddle.hpp"

#include <benchmark/benchmark.h>

using namespace revmap;

static void BM_EvalH(benchmark::State& st) {
    const HParams h{-1.0, 3.5};
    Point2 z{0.1, 0.2};
    for (auto _ : st) {
        z = eval_H(h, z);
        if (norm_inf(z) > 10) z = {0.1, 0.2};
        benchmark::DoNotOptimize(z);
    }
}
BENCHMARK(BM_EvalH);

static void BM_ImplicitH(benchmark::State& st) {
    const PlanarMap H = h_map_implicit({-1.0, 3.5});
    for (auto _ : st) benchmark::DoNotOptimize(evaluate(H, {0.3, -0.4}));
}
BENCHMARK(BM_ImplicitH);

static void BM_ClassifyRegion(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(classify_region({-1.0, 3.5}));
}
BENCHMARK(BM_ClassifyRegion);

static void BM_B1Numeric(benchmark::State& st) {
    const RotationFormMap rf = rotation_form({-1.0, 1.0}, Which::Plus);
    for (auto _ : st) benchmark::DoNotOptimize(bnf_order3_numeric(rf));
}
BENCHMARK(BM_B1Numeric);

static void BM_SaddleBVP(benchmark::State& st) {
    Series2 hh(3);
    hh.at(0, 0) = 0.3;
    hh.at(0, 2) = -0.2;
    const SaddleNF nf = nf_from_cross(0.5, hh, 8);
    const int j = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(bvp_iterate(nf, 0.1, 0.1, j));
}
BENCHMARK(BM_SaddleBVP)->Arg(10)->Arg(40);

static void BM_Cascade(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(cascade_scan({}, {8, 10, 12, 14}));
}
BENCHMARK(BM_Cascade)->Unit(benchmark::kMillisecond);

static void BM_MelnikovQuadrature(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(melnikov_quadrature({1.0, 3.0, 1.0}, 0.4));
}
BENCHMARK(BM_MelnikovQuadrature);

static void BM_PoincareMap(benchmark::State& st) {
    const PlanarMap T = full_map(0.3);
    for (auto _ : st) benchmark::DoNotOptimize(evaluate(T, {1.0, 0.5}));
}
BENCHMARK(BM_PoincareMap)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
