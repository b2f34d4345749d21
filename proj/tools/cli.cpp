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

#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "cwishart/error.hpp"

namespace cwishart::cli {

namespace {

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names{
        "density", "support",   "outliers",   "simulate",           "hist",
        "extremes", "gap-cdf", "local-stats", "compare-degeneracy", "ingest"};
    return names;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Ordered key=value pairs of a config file.
std::vector<std::pair<std::string, std::string>> read_config_file(
    const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file " + path.string());
    }
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValueError(path.string() + ":" + std::to_string(line_no) +
                             ": expected key=value");
        }
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

bool is_command(const std::string& s)
{
    const auto& names = command_names();
    return std::find(names.begin(), names.end(), s) != names.end();
}

// Option groups shared between subcommands.

void add_spectrum(CLI::App* sub, RunConfig& cfg, bool required)
{
    auto* opt = sub->add_option("--spectrum", cfg.spectrum,
                                "spectrum file: one 'value [multiplicity]' per line");
    if (required) {
        opt->required();
    }
}

void add_aspect(CLI::App* sub, RunConfig& cfg)
{
    sub->add_option("--gamma-sq", cfg.gamma_sq, "aspect ratio p/n in (0, 1]");
    sub->add_option("--n", cfg.n, "series length n (gamma_sq = p/n)");
    sub->add_option("--degeneracy", cfg.degeneracy, "degeneracy factor l")
        ->check(CLI::PositiveNumber);
}

void add_corr_source(CLI::App* sub, RunConfig& cfg)
{
    sub->add_option("--spectrum", cfg.spectrum, "diagonal C from a spectrum file");
    sub->add_option("--corr", cfg.corr, "correlation matrix CSV");
    sub->add_option("--series", cfg.series, "time-series CSV (rows = series)");
    sub->add_option("--blocks", cfg.blocks_text,
                    "one-factor recipe block sizes, e.g. 20,12,8");
    sub->add_option("--series-n", cfg.series_n, "one-factor recipe series length")
        ->check(CLI::PositiveNumber);
    sub->add_option("--s-noise", cfg.s_noise, "one-factor recipe noise strength")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--recipe-seed", cfg.recipe_seed, "one-factor recipe seed");
}

void add_sampling(CLI::App* sub, RunConfig& cfg)
{
    sub->add_option("--samples", cfg.samples, "number of Monte Carlo samples")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", cfg.seed, "base seed (required)")->required();
    sub->add_option("--workers", cfg.workers, "worker threads")
        ->check(CLI::PositiveNumber);
}

void add_output(CLI::App* sub, RunConfig& cfg)
{
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_flag("--plot", cfg.plot, "also write plot scripts");
}

std::string option_value(const CLI::Option* opt)
{
    if (opt->count() > 0) {
        const auto& r = opt->results();
        return r.empty() ? std::string() : r.back();
    }
    return opt->get_default_str();
}

std::string make_manifest(const CLI::App* sub)
{
    std::ostringstream m;
    m << "# cwishart run manifest; rerun with: cwishart --config <this file>\n";
    m << "command=" << sub->get_name() << '\n';
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_lnames().empty() ? std::string()
                                                           : opt->get_lnames().front();
        if (name.empty() || name == "help") {
            continue;
        }
        const std::string value = option_value(opt);
        if (value.empty()) {
            continue;
        }
        m << name << '=' << value << '\n';
    }
    return m.str();
}

}  // namespace

std::vector<std::size_t> parse_blocks(const std::string& text)
{
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell = trim(cell);
        if (cell.empty()) {
            continue;
        }
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(cell, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != cell.size() || v <= 0) {
            throw ValueError("invalid block size '" + cell + "'");
        }
        out.push_back(static_cast<std::size_t>(v));
    }
    if (out.empty()) {
        throw ValueError("empty block list");
    }
    return out;
}

Grid parse_grid(const std::string& text)
{
    Grid g;
    char c1 = 0;
    char c2 = 0;
    std::istringstream in(text);
    if (!(in >> g.lo >> c1 >> g.hi >> c2 >> g.points) || c1 != ':' || c2 != ':' ||
        !in.eof()) {
        throw ValueError("invalid grid '" + text + "', expected lo:hi:points");
    }
    if (!(g.hi > g.lo) || g.points < 2) {
        throw ValueError("invalid grid '" + text + "': need lo < hi and points >= 2");
    }
    return g;
}

ParseResult parse_config(int argc, const char* const* argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);

    // Pull out --config and splice its entries in front of the explicit
    // flags, so that the explicit (later) values win.
    std::optional<std::filesystem::path> config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            config_path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i + 2));
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    std::string command;
    std::vector<std::string> rest;
    for (const auto& a : args) {
        if (command.empty() && is_command(a)) {
            command = a;
        } else {
            rest.push_back(a);
        }
    }
    std::vector<std::string> injected;
    if (config_path) {
        ParseResult bad;
        bad.exit_code = usage_exit_code;
        std::vector<std::pair<std::string, std::string>> entries;
        try {
            entries = read_config_file(*config_path);
        } catch (const Error& e) {
            bad.exit_code = e.exit_code();
            bad.message = e.what();
            return bad;
        }
        for (const auto& [key, value] : entries) {
            if (key == "command") {
                if (command.empty()) {
                    command = value;
                }
                continue;
            }
            injected.push_back("--" + key + "=" + value);
        }
    }

    RunConfig cfg;
    CLI::App app{"Correlated Wishart spectra: analytic densities, outliers, "
                 "Monte Carlo ensembles and local statistics",
                 "cwishart"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.add_option("--config", "key=value file; explicit flags override it");

    auto* density = app.add_subcommand("density", "analytic level density on a grid");
    add_spectrum(density, cfg, true);
    add_aspect(density, cfg);
    density->add_option("--grid", cfg.grid, "lo:hi:points");
    add_output(density, cfg);

    auto* support = app.add_subcommand("support", "support intervals and edges");
    add_spectrum(support, cfg, true);
    add_aspect(support, cfg);
    add_output(support, cfg);

    auto* outliers = app.add_subcommand("outliers", "outlier positions and widths");
    add_spectrum(outliers, cfg, true);
    add_aspect(outliers, cfg);
    add_output(outliers, cfg);

    auto* simulate = app.add_subcommand("simulate", "sample a Wishart eigenvalue ensemble");
    add_corr_source(simulate, cfg);
    simulate->add_option("--n", cfg.n, "series length n")->required();
    simulate->add_option("--degeneracy", cfg.degeneracy, "degeneracy factor l")
        ->check(CLI::PositiveNumber);
    add_sampling(simulate, cfg);
    simulate->add_flag("--export-csv", cfg.export_csv, "also write samples.csv");
    add_output(simulate, cfg);

    auto* hist = app.add_subcommand("hist", "level-density histogram of an ensemble");
    hist->add_option("--ensemble", cfg.ensemble, "ensemble directory")->required();
    hist->add_option("--bins", cfg.bins, "number of bins")->check(CLI::PositiveNumber);
    hist->add_option("--range", cfg.range, "lo:hi histogram range");
    hist->add_option("--exclude-top", cfg.exclude_top,
                     "drop the largest eigenvalues of every sample");
    add_corr_source(hist, cfg);
    add_output(hist, cfg);

    auto* extremes = app.add_subcommand("extremes", "extreme-eigenvalue statistics");
    extremes->add_option("--ensemble", cfg.ensemble, "ensemble directory")->required();
    extremes->add_option("--which", cfg.which, "largest or smallest")
        ->check(CLI::IsMember({"largest", "smallest"}));
    extremes->add_option("--exclude-top", cfg.exclude_top,
                         "drop the largest eigenvalues of every sample");
    extremes->add_option("--bins", cfg.bins, "histogram bins")->check(CLI::PositiveNumber);
    add_output(extremes, cfg);

    auto* gap = app.add_subcommand("gap-cdf", "exact largest-eigenvalue CDF (p even)");
    add_spectrum(gap, cfg, true);
    gap->add_option("--n", cfg.n, "series length n")->required();
    gap->add_option("--t-min", cfg.t_min, "first t");
    gap->add_option("--t-max", cfg.t_max, "last t (default: where E reaches 1)");
    gap->add_option("--points", cfg.points, "number of t values")
        ->check(CLI::Range(2, 100000));
    gap->add_flag("--verify", cfg.verify, "recheck every value at higher precision");
    add_output(gap, cfg);

    auto* local = app.add_subcommand("local-stats",
                                     "unfolded spacings and standardized extremes");
    local->add_option("--ensemble", cfg.ensemble, "ensemble directory")->required();
    add_corr_source(local, cfg);
    local->add_option("--x", cfg.x, "bulk reference point (default: bulk median)");
    local->add_option("--window", cfg.window, "unfolding window in mean spacings")
        ->check(CLI::PositiveNumber);
    local->add_option("--bins", cfg.bins, "histogram bins")->check(CLI::PositiveNumber);
    local->add_option("--exclude-top", cfg.exclude_top,
                      "outliers removed before the edge statistics (default: predicted)");
    local->add_option("--goe-draws", cfg.goe_draws, "GOE reference draws (0 disables)");
    local->add_option("--seed", cfg.seed, "seed of the GOE reference");
    add_output(local, cfg);

    auto* compare = app.add_subcommand("compare-degeneracy",
                                       "compare the C and C x 1_2 ensembles");
    add_corr_source(compare, cfg);
    compare->add_option("--n", cfg.n, "series length n")->required();
    add_sampling(compare, cfg);
    compare->add_option("--bins", cfg.bins, "histogram bins")->check(CLI::PositiveNumber);
    compare->add_option("--exclude-top", cfg.exclude_top,
                        "outliers per copy removed from the bulk (default: predicted)");
    add_output(compare, cfg);

    auto* ingest = app.add_subcommand("ingest", "time series to correlation matrix and spectrum");
    ingest->add_option("--series", cfg.series, "time-series CSV (rows = series)")->required();
    add_output(ingest, cfg);

    std::vector<std::string> full{"cwishart"};
    if (!command.empty()) {
        full.push_back(command);
    }
    full.insert(full.end(), injected.begin(), injected.end());
    full.insert(full.end(), rest.begin(), rest.end());
    std::vector<const char*> cargv;
    for (const auto& s : full) {
        cargv.push_back(s.c_str());
    }

    ParseResult result;
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            std::ostringstream help;
            app.exit(e, help, help);
            result.message = help.str();
            result.exit_code = 0;
        } else {
            result.message = e.what();
            result.exit_code = usage_exit_code;
        }
        return result;
    }
    const CLI::App* sub = app.get_subcommands().front();
    cfg.command = sub->get_name();
    try {
        if (!cfg.blocks_text.empty()) {
            cfg.blocks = parse_blocks(cfg.blocks_text);
        }
        if (cfg.command == "density") {
            parse_grid(cfg.grid);
        }
    } catch (const Error& e) {
        result.message = e.what();
        result.exit_code = usage_exit_code;
        return result;
    }
    cfg.manifest = make_manifest(sub);
    result.config = std::move(cfg);
    return result;
}

}  // namespace cwishart::cli
