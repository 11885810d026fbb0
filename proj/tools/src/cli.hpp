// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Kept as a library so tests can drive it in-process.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace revmap::cli {

// bad flags, bad config, or a module precondition; exit code 2
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using RunConfig = std::map<std::string, std::string>;

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    void add_row(std::vector<std::string> row); // throws on a column count mismatch
};

std::string fmt_num(double v); // shortest round-trip form
std::string fmt_num(long long v);
std::uint64_t fnv1a(std::string_view s);
std::string config_dump(const RunConfig& cfg);

// `key = value` lines grouped by [section]; keys before any section land under ""
std::map<std::string, RunConfig> parse_config(std::string_view text);

void write_csv(std::ostream& os, const std::string& subcommand, const RunConfig& cfg,
               const ResultTable& t);
void write_json(std::ostream& os, const std::string& subcommand, const RunConfig& cfg,
                const ResultTable& t);

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace revmap::cli
