/*
 * Copyright 2026 The cwishart Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cwishart::cli {

/// Fully resolved parameters of one command-line run.
struct RunConfig
{
    std::string command;

    // Inputs.
    std::filesystem::path spectrum;
    std::filesystem::path corr;
    std::filesystem::path series;
    std::filesystem::path ensemble;
    std::string blocks_text;
    std::vector<std::size_t> blocks;
    std::size_t series_n = 100;
    double s_noise = 4.0;
    std::uint64_t recipe_seed = 0;

    // Ensemble and analytic parameters.
    std::optional<double> gamma_sq;
    std::optional<std::size_t> n;
    std::size_t degeneracy = 1;
    std::string grid = "0:4:600";
    std::size_t samples = 10000;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 1;
    std::size_t bins = 100;
    std::string range;
    std::optional<std::size_t> exclude_top;
    std::string which = "largest";
    double t_min = 0.0;
    std::optional<double> t_max;
    std::size_t points = 100;
    std::optional<double> x;
    double window = 10.0;
    std::size_t goe_draws = 2000;
    bool export_csv = false;
    bool verify = false;

    // Output.
    std::filesystem::path out = ".";
    bool plot = false;

    /// key=value lines recording every resolved option; feeding the file
    /// back through --config reproduces the run.
    std::string manifest;
};

/// Exit status of a usage error.
inline constexpr int usage_exit_code = 2;

/// Result of parsing: either a config or an exit code with a message
/// (help output, usage error).
struct ParseResult
{
    std::optional<RunConfig> config;
    int exit_code = 0;
    std::string message;
};

/// Parse argv.  A `--config FILE` of key=value lines supplies defaults that
/// explicit flags override; the key `command` selects the subcommand when
/// none is given on the command line.
ParseResult parse_config(int argc, const char* const* argv);

/// Execute a parsed configuration, writing CSV outputs, optional plot
/// scripts and run-manifest.txt into cfg.out.  Throws cwishart::Error.
void run(const RunConfig& cfg);

/// Parse "20,12,8" block lists.
std::vector<std::size_t> parse_blocks(const std::string& text);

/// Parse "a:b:N" grids.
struct Grid
{
    double lo = 0.0;
    double hi = 0.0;
    std::size_t points = 0;
};
Grid parse_grid(const std::string& text);

}  // namespace cwishart::cli
