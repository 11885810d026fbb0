// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace revmap::cli {

struct CheckOptions {
    std::uint64_t seed = 1;
    int samples = 200;
    bool with_rotators = true;
};

struct CheckResult {
    std::string name;
    double value = 0.0;
    double threshold = 0.0;
    bool pass = false;
};

// fast versions of the library invariants; each value must stay at or below its threshold
std::vector<CheckResult> run_checks(const CheckOptions& opt);

} // namespace revmap::cli
