// SPDX-License-Identifier: Apache-2.0
//
// Small seeded generators for property tests.
#pragma once

#include "revmap/core.hpp"
#include "revmap/hmap.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace revmap::testing {

// splitmix64; each property owns a stream so failures reproduce from the seed alone
class Gen {
public:
    explicit Gen(std::uint64_t seed) : s_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (s_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * unit(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
    bool coin() { return (next() >> 63) != 0; }

    Point2 point(double r) { return {uniform(-r, r), uniform(-r, r)}; }
    std::vector<Point2> points(int n, double r) {
        std::vector<Point2> v;
        for (int i = 0; i < n; ++i) v.push_back(point(r));
        return v;
    }

    // c_tilde in [-3, 3] away from 0, M_tilde in [-5, 5]
    HParams hparams(double c_gap = 0.05) {
        double c = 0.0;
        while (std::abs(c) < c_gap) c = uniform(-3.0, 3.0);
        return {c, uniform(-5.0, 5.0)};
    }

private:
    std::uint64_t s_;
};

} // namespace revmap::testing
