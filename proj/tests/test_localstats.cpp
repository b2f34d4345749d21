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

#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cwishart/error.hpp"
#include "cwishart/localstats.hpp"
#include "cwishart/montecarlo.hpp"
#include "cwishart/saddle.hpp"

using namespace cwishart;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

using gk = boost::math::quadrature::gauss_kronrod<double, 61>;

double mean_of(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

TEST_CASE("Wigner surmise moments", "[localstats][surmise]")
{
    CHECK(wigner_surmise(0.0) == 0.0);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THAT(gk::integrate(wigner_surmise, 0.0, inf, 10, 1e-13), WithinAbs(1.0, 1e-10));
    CHECK_THAT(gk::integrate([](double s) { return s * wigner_surmise(s); }, 0.0, inf, 10, 1e-13),
               WithinAbs(1.0, 1e-10));
    const double mode = std::sqrt(2.0 / std::numbers::pi);
    CHECK(wigner_surmise(mode) > wigner_surmise(mode - 1e-4));
    CHECK(wigner_surmise(mode) > wigner_surmise(mode + 1e-4));
    CHECK_THAT(wigner_surmise_cdf(1.3),
               WithinAbs(gk::integrate(wigner_surmise, 0.0, 1.3, 10, 1e-14), 1e-12));
    CHECK_THROWS_AS(wigner_surmise(-1.0), ValueError);
}

TEST_CASE("Tracy-Widom approximation", "[localstats][tw]")
{
    CHECK(tw_approx(-9.0) == 0.0);
    CHECK(tw_approx_cdf(-9.0) == 0.0);
    const double norm = gk::integrate(tw_approx, -8.93, 40.0, 15, 1e-12);
    const double mean =
        gk::integrate([](double t) { return t * tw_approx(t); }, -8.93, 40.0, 15, 1e-12) / norm;
    const double var = gk::integrate([&](double t) { return (t - mean) * (t - mean) * tw_approx(t); },
                                     -8.93, 40.0, 15, 1e-12) /
                       norm;
    CHECK_THAT(norm, WithinAbs(1.0, 0.01));
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.02);
    // The CDF is the normalised integral of the density.
    for (double t : {-3.0, -1.0, 0.0, 1.5, 4.0}) {
        CHECK_THAT(tw_approx_cdf(t), WithinAbs(gk::integrate(tw_approx, -8.93, t, 15, 1e-12) / norm,
                                               1e-9));
    }
    CHECK_THAT(tw_approx_cdf(30.0), WithinAbs(1.0, 1e-12));
}

TEST_CASE("soft-edge unfolding scale", "[localstats][edge]")
{
    const EmpiricalSpectrum s({{1.0, 40}});
    const AspectRatio a(0.25);
    CHECK_THAT(edge_bracket(s, a, -2.0 / 3.0), WithinRel(10.125, 1e-13));
    const double scale = edge_scale(s, a, 2.25, -2.0 / 3.0);
    CHECK_THAT(scale, WithinRel(std::cbrt(1.0 / 10.125) / std::pow(0.25, 2.0 / 3.0), 1e-13));
    CHECK_THAT(scale, WithinAbs(1.16477, 1e-5));
    for (std::size_t l : {2u, 3u, 5u}) {
        const auto d = expand_degeneracy(degenerate_spectrum(s, l));
        CHECK(edge_scale(d, a, 2.25, -2.0 / 3.0) == scale);
    }
    // Past the lower critical point the bracket changes sign.
    CHECK_THROWS_WITH(edge_scale(s, a, 0.25, -2.0),
                      ContainsSubstring("invalid edge expansion"));

    const std::vector<double> samples{2.0, 2.25, 2.5};
    const auto u = unfold_edge(samples, 2.25, scale, 40);
    REQUIRE(u.values.size() == 3);
    CHECK(u.values[1] == 0.0);
    CHECK_THAT(u.values[2], WithinRel(scale * 0.25 * std::pow(40.0, 2.0 / 3.0), 1e-14));
}

TEST_CASE("bulk unfolding rejects points outside the bulk", "[localstats][unfold]")
{
    const SaddlePoint sp(EmpiricalSpectrum({{1.0, 40}}), AspectRatio(0.25));
    const std::vector<double> eigs{0.5, 1.0, 1.5};
    CHECK_THROWS_WITH(unfold_bulk(eigs, 3.0, sp, 40), ContainsSubstring("not in bulk"));
    CHECK_THROWS_AS(BulkUnfolder(sp, 0.1, 40), ValueError);
    const auto u = unfold_bulk(eigs, 1.0, sp, 40, 100.0);
    REQUIRE(u.values.size() == 3);
    CHECK(u.values[1] == 0.0);
    CHECK_THAT(u.values[2], WithinRel(0.5 * 40.0 * sp.density(1.0), 1e-14));
}

TEST_CASE("unfolded bulk spacings have unit mean", "[localstats][unfold][mc]")
{
    struct Config
    {
        Eigen::MatrixXd c;
        EmpiricalSpectrum s;
        double gamma_sq;
        double x;
    };
    Eigen::VectorXd two(60);
    for (Eigen::Index i = 0; i < 60; ++i) {
        two(i) = i < 30 ? 1.0 : 3.0;
    }
    const std::vector<Config> configs{
        {Eigen::MatrixXd::Identity(60, 60), EmpiricalSpectrum({{1.0, 60}}), 0.25, 1.0},
        {Eigen::MatrixXd::Identity(60, 60), EmpiricalSpectrum({{1.0, 60}}), 0.5, 0.8},
        {two.asDiagonal(), EmpiricalSpectrum({{1.0, 30}, {3.0, 30}}), 0.2, 2.0}};
    for (const auto& cfg : configs) {
        const auto n = static_cast<std::size_t>(std::lround(60.0 / cfg.gamma_sq));
        EnsembleOptions opts;
        opts.workers = 2;
        const auto e = run_ensemble(cfg.c, n, 1, 2500, 21, opts);
        const SaddlePoint sp(cfg.s, AspectRatio(cfg.gamma_sq));
        std::vector<double> linear;
        for (std::size_t k = 0; k < e.count(); ++k) {
            const auto sp_k = nearest_neighbor_spacings(unfold_bulk(e.sample(k), cfg.x, sp, 60));
            linear.insert(linear.end(), sp_k.begin(), sp_k.end());
        }
        const auto integrated = BulkUnfolder(sp, cfg.x, 60).spacings(e);
        CHECK(linear.size() > 30000);
        // The linearised form ignores the curvature of R₁ across the window
        // and is biased by a few percent; the integrated form is not.
        CHECK_THAT(mean_of(linear), WithinAbs(1.0, 0.05));
        CHECK_THAT(mean_of(integrated), WithinAbs(1.0, 0.02));
    }
}

TEST_CASE("bulk centre is the median of the main component", "[localstats]")
{
    const SaddlePoint sp(EmpiricalSpectrum({{1.0, 40}}), AspectRatio(0.25));
    const double x = bulk_center(sp);
    CHECK_THAT(sp.integrate_density(0.25, x), WithinAbs(0.5, 1e-8));
}

TEST_CASE("GOE spacings follow the Wigner surmise", "[localstats][goe][mc]")
{
    GoeSpacingOptions opts;
    opts.draws = 20000;
    opts.seed = 3;
    const auto goe = goe_spacings(opts);
    CHECK(goe.size() == 1000000);
    CHECK_THAT(mean_of(goe), WithinAbs(1.0, 0.01));
    const auto h = spacing_histogram(goe, 40, 4.0);
    double area = 0.0;
    double sup = 0.0;
    for (std::size_t b = 0; b < h.bins(); ++b) {
        area += h.heights[b] * h.width(b);
        sup = std::max(sup, std::abs(h.heights[b] - wigner_surmise(h.center(b))));
    }
    CHECK_THAT(area, WithinAbs(1.0, 1e-12));
    const double peak = wigner_surmise(std::sqrt(2.0 / std::numbers::pi));
    CHECK(sup < 0.03 * peak);

    const auto poisson = poisson_spacings(100000, 5);
    CHECK(ks_distance(poisson, goe) > 0.1);
    CHECK(ks_distance(poisson, [](double s) { return s > 0 ? -std::expm1(-s) : 0.0; }) < 0.01);
}

TEST_CASE("spacing histogram preconditions", "[localstats]")
{
    const std::vector<double> few(50, 1.0);
    CHECK_THROWS_WITH(spacing_histogram(few, 10), ContainsSubstring("too few spacings"));
    const auto norm = normalize_mean(std::vector<double>{1.0, 2.0, 3.0});
    CHECK_THAT(mean_of(norm), WithinAbs(1.0, 1e-15));
}
