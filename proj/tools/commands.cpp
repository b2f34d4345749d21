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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cli.hpp"
#include "cwishart/csv.hpp"
#include "cwishart/error.hpp"
#include "cwishart/gapcdf.hpp"
#include "cwishart/localstats.hpp"
#include "cwishart/montecarlo.hpp"
#include "cwishart/outliers.hpp"
#include "cwishart/saddle.hpp"
#include "cwishart/series.hpp"
#include "cwishart/spectrum.hpp"

namespace cwishart::cli {

namespace {

using Metadata = std::vector<std::pair<std::string, std::string>>;

/// Writes tables into the output directory, optionally with a matplotlib
/// script per table that plots every column against the first one.
class Output
{
public:
    explicit Output(const RunConfig& cfg) : dir_(cfg.out), plot_(cfg.plot)
    {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) {
            throw IoError("cannot create output directory " + dir_.string() + ": " +
                          ec.message());
        }
        base_.emplace_back("command", cfg.command);
    }

    const std::filesystem::path& dir() const noexcept { return dir_; }

    void table(const std::string& name, CsvTable t) const
    {
        t.metadata.insert(t.metadata.begin(), base_.begin(), base_.end());
        write_csv(dir_ / (name + ".csv"), t);
        if (plot_) {
            script(name, t.header);
        }
    }

    void text_table(const std::string& name, Metadata meta,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows) const
    {
        meta.insert(meta.begin(), base_.begin(), base_.end());
        write_text_csv(dir_ / (name + ".csv"), meta, header, rows);
    }

    void text(const std::string& file, const std::string& content) const
    {
        std::ofstream out(dir_ / file);
        out << content;
        if (!out) {
            throw IoError("cannot write " + (dir_ / file).string());
        }
    }

private:
    void script(const std::string& name, const std::vector<std::string>& header) const
    {
        std::ostringstream s;
        s << "# Plot " << name << ".csv (generated by cwishart).\n"
          << "import numpy as np\n"
          << "import matplotlib.pyplot as plt\n\n"
          << "data = np.genfromtxt('" << name
          << ".csv', delimiter=',', comments='#', names=True)\n"
          << "x = data['" << header.front() << "']\n"
          << "for name in data.dtype.names[1:]:\n"
          << "    plt.plot(x, data[name], label=name)\n"
          << "plt.xlabel('" << header.front() << "')\n"
          << "plt.legend()\n"
          << "plt.savefig('" << name << ".png', dpi=150)\n";
        text(name + ".plot.py", s.str());
    }

    std::filesystem::path dir_;
    bool plot_;
    Metadata base_;
};

std::string fmt(double v) { return format_double(v); }

EmpiricalSpectrum spectrum_input(const RunConfig& cfg)
{
    auto s = load_spectrum(cfg.spectrum);
    return cfg.degeneracy > 1 ? degenerate_spectrum(s, cfg.degeneracy) : s;
}

AspectRatio aspect_input(const RunConfig& cfg, const EmpiricalSpectrum& s)
{
    if (cfg.gamma_sq) {
        return AspectRatio(*cfg.gamma_sq);
    }
    if (cfg.n) {
        return AspectRatio::from_dimensions(s.p(), *cfg.n);
    }
    throw ValueError("one of --gamma-sq or --n is required");
}

struct CorrInput
{
    Eigen::MatrixXd c;
    std::string description;
};

CorrInput corr_input(const RunConfig& cfg)
{
    if (!cfg.corr.empty()) {
        CorrelationMatrix c(load_series_csv(cfg.corr));
        return {c.entries(), "corr:" + cfg.corr.string()};
    }
    if (!cfg.series.empty()) {
        return {estimate_correlation(load_series_csv(cfg.series)).entries(),
                "series:" + cfg.series.string()};
    }
    if (!cfg.blocks.empty()) {
        OneFactorConfig rc{cfg.blocks, cfg.series_n, cfg.s_noise, cfg.recipe_seed};
        rc.validate();
        return {estimate_correlation(one_factor_series(rc)).entries(),
                "one-factor:" + cfg.blocks_text + "/n=" + std::to_string(cfg.series_n) +
                    "/s_noise=" + fmt(cfg.s_noise) + "/seed=" +
                    std::to_string(cfg.recipe_seed)};
    }
    if (!cfg.spectrum.empty()) {
        return {diagonal_matrix(load_spectrum(cfg.spectrum)),
                "spectrum:" + cfg.spectrum.string()};
    }
    throw ValueError("no correlation input: give --corr, --series, --blocks or --spectrum");
}

bool has_corr_input(const RunConfig& cfg)
{
    return !cfg.corr.empty() || !cfg.series.empty() || !cfg.blocks.empty() ||
           !cfg.spectrum.empty();
}

/// Number of separated outliers predicted for spectrum s (per copy).
std::size_t predicted_outliers(const EmpiricalSpectrum& s, AspectRatio a)
{
    const SaddlePoint sp(s, a);
    std::size_t count = 0;
    for (const auto& r : classify_outliers(s, a, sp.support())) {
        if (r.separated) {
            count += s.multiplicities()[r.index];
        }
    }
    return count;
}

/// The largest-mass support component.
const SupportInterval& main_interval(const SpectralSupport& supp)
{
    if (supp.intervals.empty()) {
        throw NumericError("empty support");
    }
    return *std::max_element(supp.intervals.begin(), supp.intervals.end(),
                             [](const auto& a, const auto& b) { return a.mass < b.mass; });
}

std::vector<double> centers(const HistogramDensity& h)
{
    std::vector<double> out(h.bins());
    for (std::size_t b = 0; b < h.bins(); ++b) {
        out[b] = h.center(b);
    }
    return out;
}

double mean_of(std::span<const double> v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v)
{
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) {
        s += (x - m) * (x - m);
    }
    return s / static_cast<double>(v.size() - 1);
}

// --- subcommands ---------------------------------------------------------

void cmd_density(const RunConfig& cfg, const Output& out)
{
    const auto s = spectrum_input(cfg);
    const auto a = aspect_input(cfg, s);
    const Grid g = parse_grid(cfg.grid);
    const SaddlePoint sp(s, a);
    CsvTable t;
    t.metadata = {{"gamma_sq", fmt(a.gamma_sq())},
                  {"p", std::to_string(s.p())},
                  {"degeneracy", std::to_string(s.degeneracy_l())}};
    std::vector<double> xs(g.points);
    for (std::size_t i = 0; i < g.points; ++i) {
        xs[i] = g.lo + (g.hi - g.lo) * static_cast<double>(i) / (g.points - 1);
    }
    t.add_column("x", xs);
    t.add_column("density", density_grid(sp, g.lo, g.hi, g.points));
    out.table("density", std::move(t));
}

void cmd_support(const RunConfig& cfg, const Output& out)
{
    const auto s = spectrum_input(cfg);
    const auto a = aspect_input(cfg, s);
    const auto supp = support(s, a);
    std::vector<std::vector<std::string>> rows;
    for (std::size_t i = 0; i < supp.intervals.size(); ++i) {
        const auto& iv = supp.intervals[i];
        for (const Edge* e : {&iv.lower, &iv.upper}) {
            rows.push_back({fmt(e->x), e->kind == EdgeKind::lower ? "lower" : "upper",
                            fmt(e->coefficient), std::to_string(i), fmt(iv.mass),
                            e->hard ? "hard" : "soft"});
        }
    }
    out.text_table("support",
                   {{"gamma_sq", fmt(a.gamma_sq())},
                    {"intervals", std::to_string(supp.intervals.size())}},
                   {"edge", "type", "coefficient", "interval", "mass", "regime"}, rows);
}

void cmd_outliers(const RunConfig& cfg, const Output& out)
{
    const auto s = spectrum_input(cfg);
    const auto a = aspect_input(cfg, s);
    const auto reports = classify_outliers(s, a, support(s, a));
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : reports) {
        rows.push_back({fmt(r.lambda_o), fmt(r.x0), r.width ? fmt(*r.width) : "",
                        r.valid ? "1" : "0", r.separated ? "1" : "0", fmt(r.condition)});
    }
    out.text_table("outliers", {{"gamma_sq", fmt(a.gamma_sq())}},
                   {"lambda_o", "x0", "width", "valid", "separated", "condition"}, rows);
}

void cmd_simulate(const RunConfig& cfg, const Output& out)
{
    const auto input = corr_input(cfg);
    EnsembleOptions opts;
    opts.workers = cfg.workers;
    opts.out_dir = out.dir() / "ensemble";
    const auto e = run_ensemble(input.c, *cfg.n, cfg.degeneracy, cfg.samples, *cfg.seed, opts);
    if (cfg.export_csv) {
        CsvTable t;
        t.metadata = {{"source", input.description}, {"c_hash", e.meta().c_hash}};
        for (std::size_t j = 0; j < e.dimension(); ++j) {
            std::vector<double> col(e.count());
            for (std::size_t k = 0; k < e.count(); ++k) {
                col[k] = e.sample(k)[j];
            }
            t.add_column("e" + std::to_string(j), std::move(col));
        }
        out.table("samples", std::move(t));
    }
    out.text("source.txt", input.description + "\n");
}

void cmd_hist(const RunConfig& cfg, const Output& out)
{
    const auto e = load_ensemble(cfg.ensemble);
    std::optional<std::pair<double, double>> range;
    if (!cfg.range.empty()) {
        const Grid g = parse_grid(cfg.range + ":2");
        range = std::make_pair(g.lo, g.hi);
    }
    const std::size_t exclude = cfg.exclude_top.value_or(0);
    const auto h = histogram_density(e, cfg.bins, range, exclude);
    CsvTable t;
    t.metadata = {{"samples", std::to_string(e.count())},
                  {"exclude_top", std::to_string(exclude)}};
    t.add_column("x", centers(h));
    t.add_column("density", h.heights);
    t.add_column("count", h.counts);
    if (has_corr_input(cfg)) {
        const auto s = CorrelationMatrix(corr_input(cfg).c).spectrum(e.meta().l);
        const SaddlePoint sp(s, AspectRatio::from_dimensions(e.meta().p, e.meta().n));
        std::vector<double> analytic(h.bins());
        for (std::size_t b = 0; b < h.bins(); ++b) {
            analytic[b] = sp.density(h.center(b));
        }
        t.add_column("analytic", std::move(analytic));
        if (exclude == 0) {
            t.metadata.emplace_back(
                "tv_analytic", fmt(tv_distance(h, [&](double x) { return sp.density(x); })));
        }
    }
    out.table("hist", std::move(t));
}

void cmd_extremes(const RunConfig& cfg, const Output& out)
{
    const auto e = load_ensemble(cfg.ensemble);
    const bool smallest = cfg.which == "smallest";
    const std::size_t exclude = cfg.exclude_top.value_or(0);
    const auto values = extreme_samples(e, smallest ? Extreme::smallest : Extreme::largest,
                                        exclude);
    const auto z = standardize(values, smallest);
    CsvTable t;
    t.metadata = {{"which", cfg.which},
                  {"exclude_top", std::to_string(exclude)},
                  {"mean", fmt(mean_of(values))},
                  {"variance", fmt(variance_of(values))},
                  {"ks_tw", fmt(ks_distance(z, tw_approx_cdf))}};
    std::vector<double> index(values.size());
    std::iota(index.begin(), index.end(), 0.0);
    t.add_column("sample", std::move(index));
    t.add_column("value", values);
    t.add_column("standardized", z);
    out.table("extremes", std::move(t));

    const auto h = histogram(z, cfg.bins, -5.0, 5.0);
    CsvTable d;
    d.add_column("t", centers(h));
    d.add_column("density", h.heights);
    std::vector<double> tw(h.bins());
    for (std::size_t b = 0; b < h.bins(); ++b) {
        tw[b] = tw_approx(h.center(b));
    }
    d.add_column("tw_approx", std::move(tw));
    out.table("extremes_density", std::move(d));
}

void cmd_gap_cdf(const RunConfig& cfg, const Output& out)
{
    const auto s = load_spectrum(cfg.spectrum);
    const std::size_t n = *cfg.n;
    GapCdfOptions opts;
    opts.verify = cfg.verify;
    double t_max = 0.0;
    if (cfg.t_max) {
        t_max = *cfg.t_max;
    } else {
        // Grow the range until the CDF has saturated.
        t_max = 4.0 * s.values().back();
        while (gap_cdf(t_max, s, n, opts) < 1.0 - 1e-6) {
            t_max *= 1.5;
        }
    }
    if (!(t_max > cfg.t_min)) {
        throw ValueError("--t-max must exceed --t-min");
    }
    std::vector<double> ts(cfg.points);
    std::vector<double> es(cfg.points);
    for (std::size_t i = 0; i < cfg.points; ++i) {
        ts[i] = cfg.t_min + (t_max - cfg.t_min) * static_cast<double>(i) / (cfg.points - 1);
        es[i] = gap_cdf(ts[i], s, n, opts);
    }
    CsvTable t;
    t.metadata = {{"n", std::to_string(n)},
                  {"p", std::to_string(s.p())},
                  {"convention", "E(t) = P(lambda_max <= t/2) for C x 1_2, 1/(2n) normalisation"}};
    t.add_column("t", std::move(ts));
    t.add_column("E", std::move(es));
    out.table("gap_cdf", std::move(t));
}

void cmd_local_stats(const RunConfig& cfg, const Output& out)
{
    const auto e = load_ensemble(cfg.ensemble);
    const auto s = CorrelationMatrix(corr_input(cfg).c).spectrum(e.meta().l);
    const auto a = AspectRatio::from_dimensions(e.meta().p, e.meta().n);
    const SaddlePoint sp(s, a);
    const double x = cfg.x.value_or(bulk_center(sp));
    const BulkUnfolder unfolder(sp, x, e.dimension(), cfg.window);
    const auto spacings = unfolder.spacings(e);
    const auto h = spacing_histogram(spacings, cfg.bins, 4.0);

    CsvTable t;
    t.metadata = {{"x", fmt(x)},
                  {"spacings", std::to_string(spacings.size())},
                  {"mean_spacing", fmt(mean_of(spacings))},
                  {"ks_wigner", fmt(ks_distance(spacings, wigner_surmise_cdf))}};
    t.add_column("s", centers(h));
    t.add_column("density", h.heights);
    std::vector<double> ws(h.bins());
    for (std::size_t b = 0; b < h.bins(); ++b) {
        ws[b] = wigner_surmise(h.center(b));
    }
    t.add_column("wigner", std::move(ws));
    if (cfg.goe_draws > 0) {
        GoeSpacingOptions g;
        g.draws = cfg.goe_draws;
        g.seed = cfg.seed.value_or(0);
        const auto goe = goe_spacings(g);
        t.metadata.emplace_back("ks_goe", fmt(ks_distance(spacings, goe)));
        t.add_column("goe", spacing_histogram(goe, cfg.bins, 4.0).heights);
    }
    out.table("spacing", std::move(t));

    // Edge statistics of the bulk largest and smallest eigenvalues.
    const std::size_t exclude =
        cfg.exclude_top.value_or(predicted_outliers(s, a) * e.meta().l);
    const auto top = standardize(extreme_samples(e, Extreme::largest, exclude));
    const auto bottom = standardize(extreme_samples(e, Extreme::smallest, 0), true);
    const auto ht = histogram(top, cfg.bins, -5.0, 5.0);
    const auto hb = histogram(bottom, cfg.bins, -5.0, 5.0);
    CsvTable d;
    d.metadata = {{"exclude_top", std::to_string(exclude)},
                  {"ks_tw_largest", fmt(ks_distance(top, tw_approx_cdf))},
                  {"ks_tw_smallest", fmt(ks_distance(bottom, tw_approx_cdf))}};
    d.add_column("t", centers(ht));
    d.add_column("largest", ht.heights);
    d.add_column("smallest", hb.heights);
    std::vector<double> tw(ht.bins());
    for (std::size_t b = 0; b < ht.bins(); ++b) {
        tw[b] = tw_approx(ht.center(b));
    }
    d.add_column("tw_approx", std::move(tw));
    out.table("edge", std::move(d));
}

void cmd_compare(const RunConfig& cfg, const Output& out)
{
    const auto input = corr_input(cfg);
    const auto s = CorrelationMatrix(input.c).spectrum();
    const auto a = AspectRatio::from_dimensions(s.p(), *cfg.n);
    const SaddlePoint sp(s, a);
    const std::size_t exclude = cfg.exclude_top.value_or(predicted_outliers(s, a));
    const auto& bulk = main_interval(sp.support());
    const double pad = 0.05 * bulk.width();
    const auto range = std::make_pair(std::max(0.0, bulk.lower.x - pad), bulk.upper.x + pad);

    EnsembleOptions opts;
    opts.workers = cfg.workers;
    const auto e1 = run_ensemble(input.c, *cfg.n, 1, cfg.samples, *cfg.seed, opts);
    const auto e2 = run_ensemble(input.c, *cfg.n, 2, cfg.samples, *cfg.seed, opts);
    const auto h1 = histogram_density(e1, cfg.bins, range, exclude);
    const auto h2 = histogram_density(e2, cfg.bins, range, 2 * exclude);
    const auto rho = [&](double x) { return sp.density(x); };

    const auto max1 = standardize(extreme_samples(e1, Extreme::largest, exclude));
    const auto max2 = standardize(extreme_samples(e2, Extreme::largest, 2 * exclude));
    const auto min1 = standardize(extreme_samples(e1, Extreme::smallest, 0), true);
    const auto min2 = standardize(extreme_samples(e2, Extreme::smallest, 0), true);

    std::vector<std::pair<std::string, double>> metrics{
        {"tv_bulk_l1_vs_l2", tv_distance(h1, h2)},
        {"tv_bulk_l1_vs_analytic", tv_distance(h1, rho)},
        {"tv_bulk_l2_vs_analytic", tv_distance(h2, rho)},
        {"ks_lambda_max_l1_vs_l2", ks_distance(max1, max2)},
        {"ks_lambda_min_l1_vs_l2", ks_distance(min1, min2)},
        {"ks_lambda_max_l1_vs_tw", ks_distance(max1, tw_approx_cdf)},
        {"ks_lambda_max_l2_vs_tw", ks_distance(max2, tw_approx_cdf)},
        {"ks_lambda_min_l1_vs_tw", ks_distance(min1, tw_approx_cdf)},
        {"ks_lambda_min_l2_vs_tw", ks_distance(min2, tw_approx_cdf)}};
    std::vector<std::vector<std::string>> rows;
    for (const auto& [name, value] : metrics) {
        rows.push_back({name, fmt(value)});
    }
    const Metadata meta{{"source", input.description},
                        {"gamma_sq", fmt(a.gamma_sq())},
                        {"samples", std::to_string(cfg.samples)},
                        {"exclude_top", std::to_string(exclude)}};
    out.text_table("report", meta, {"metric", "value"}, rows);

    CsvTable t;
    t.metadata = meta;
    t.add_column("x", centers(h1));
    t.add_column("density_l1", h1.heights);
    t.add_column("density_l2", h2.heights);
    std::vector<double> analytic(h1.bins());
    for (std::size_t b = 0; b < h1.bins(); ++b) {
        analytic[b] = sp.density(h1.center(b));
    }
    t.add_column("analytic", std::move(analytic));
    out.table("compare_bulk", std::move(t));

    const auto hm1 = histogram(max1, cfg.bins, -5.0, 5.0);
    const auto hm2 = histogram(max2, cfg.bins, -5.0, 5.0);
    CsvTable x;
    x.metadata = meta;
    x.add_column("t", centers(hm1));
    x.add_column("lambda_max_l1", hm1.heights);
    x.add_column("lambda_max_l2", hm2.heights);
    std::vector<double> tw(hm1.bins());
    for (std::size_t b = 0; b < hm1.bins(); ++b) {
        tw[b] = tw_approx(hm1.center(b));
    }
    x.add_column("tw_approx", std::move(tw));
    out.table("compare_extremes", std::move(x));
}

void cmd_ingest(const RunConfig& cfg, const Output& out)
{
    const auto series = load_series_csv(cfg.series);
    const auto c = estimate_correlation(series);
    {
        std::ofstream f(out.dir() / "correlation.csv");
        write_matrix_csv(f, c.entries());
        if (!f) {
            throw IoError("cannot write correlation.csv");
        }
    }
    {
        std::ofstream f(out.dir() / "spectrum.txt");
        write_spectrum(f, c.spectrum());
        if (!f) {
            throw IoError("cannot write spectrum.txt");
        }
    }
    CsvTable t;
    t.metadata = {{"p", std::to_string(series.rows())}, {"n", std::to_string(series.cols())}};
    std::vector<double> idx(static_cast<std::size_t>(c.eigenvalues().size()));
    std::iota(idx.begin(), idx.end(), 0.0);
    t.add_column("index", std::move(idx));
    t.add_column("eigenvalue",
                 std::vector<double>(c.eigenvalues().data(),
                                     c.eigenvalues().data() + c.eigenvalues().size()));
    out.table("eigenvalues", std::move(t));
}

}  // namespace

void run(const RunConfig& cfg)
{
    const Output out(cfg);
    out.text("run-manifest.txt", cfg.manifest);
    if (cfg.command == "density") {
        cmd_density(cfg, out);
    } else if (cfg.command == "support") {
        cmd_support(cfg, out);
    } else if (cfg.command == "outliers") {
        cmd_outliers(cfg, out);
    } else if (cfg.command == "simulate") {
        cmd_simulate(cfg, out);
    } else if (cfg.command == "hist") {
        cmd_hist(cfg, out);
    } else if (cfg.command == "extremes") {
        cmd_extremes(cfg, out);
    } else if (cfg.command == "gap-cdf") {
        cmd_gap_cdf(cfg, out);
    } else if (cfg.command == "local-stats") {
        cmd_local_stats(cfg, out);
    } else if (cfg.command == "compare-degeneracy") {
        cmd_compare(cfg, out);
    } else if (cfg.command == "ingest") {
        cmd_ingest(cfg, out);
    } else {
        throw ValueError("unknown command '" + cfg.command + "'");
    }
}

}  // namespace cwishart::cli
