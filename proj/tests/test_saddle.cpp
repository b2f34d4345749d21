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

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "cwishart/error.hpp"
#include "cwishart/random.hpp"
#include "cwishart/saddle.hpp"

using namespace cwishart;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

EmpiricalSpectrum identity_spectrum(std::size_t p = 40)
{
    return EmpiricalSpectrum({{1.0, p}});
}

double marchenko_pastur(double x, double gamma_sq)
{
    const double g = std::sqrt(gamma_sq);
    const double lo = (1 - g) * (1 - g);
    const double hi = (1 + g) * (1 + g);
    if (x <= lo || x >= hi) {
        return 0.0;
    }
    return std::sqrt((hi - x) * (x - lo)) / (2.0 * std::numbers::pi * gamma_sq * x);
}

EmpiricalSpectrum random_spectrum(Engine& rng)
{
    std::uniform_real_distribution<double> value(0.2, 6.0);
    std::uniform_int_distribution<int> mult(1, 4);
    std::uniform_int_distribution<int> count(1, 6);
    std::vector<std::pair<double, std::size_t>> entries;
    const int m = count(rng);
    for (int i = 0; i < m; ++i) {
        entries.emplace_back(value(rng), static_cast<std::size_t>(mult(rng)));
    }
    return EmpiricalSpectrum(entries);
}

}  // namespace

TEST_CASE("saddle point reproduces Marchenko-Pastur", "[saddle][oracle]")
{
    const auto start = std::chrono::steady_clock::now();
    for (double gamma_sq : {0.25, 0.5, 1.0}) {
        const SaddlePoint sp(identity_spectrum(), AspectRatio(gamma_sq));
        const double g = std::sqrt(gamma_sq);
        const double lo = (1 - g) * (1 - g);
        const double hi = (1 + g) * (1 + g);
        double worst = 0.0;
        for (int i = 0; i < 600; ++i) {
            const double x = 0.001 + (hi + 0.5) * i / 599.0;
            if (std::abs(x - lo) < 1e-3 || std::abs(x - hi) < 1e-3) {
                continue;
            }
            worst = std::max(worst, std::abs(sp.density(x) - marchenko_pastur(x, gamma_sq)));
        }
        CHECK(worst < 1e-8);
        const auto supp = sp.support();
        REQUIRE(supp.intervals.size() == 1);
        CHECK_THAT(supp.upper(), WithinAbs(hi, 1e-10));
        if (gamma_sq < 1.0) {
            CHECK_THAT(supp.lower(), WithinAbs(lo, 1e-10));
            CHECK_FALSE(supp.hard_edge_at_origin);
        } else {
            CHECK(supp.hard_edge_at_origin);
            CHECK(supp.intervals.front().lower.hard);
            CHECK(supp.lower() == 0.0);
        }
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(seconds < 2.0);
}

TEST_CASE("saddle point reference values", "[saddle]")
{
    const SaddlePoint sp(identity_spectrum(), AspectRatio(0.25));
    const auto sol = sp.solve(1.0);
    CHECK(sol.in_support);
    CHECK_THAT(sol.q0.real(), WithinAbs(-0.875, 1e-10));
    CHECK_THAT(sol.q0.imag(), WithinAbs(std::sqrt(15.0) / 8.0, 1e-10));
    CHECK_THAT(sp.density(1.0), WithinAbs(0.616404, 1e-6));
    const auto supp = sp.support();
    CHECK_THAT(supp.intervals[0].upper.coefficient, WithinRel(0.400141, 1e-5));
    CHECK_THAT(supp.intervals[0].lower.coefficient, WithinRel(3.601265, 1e-5));
    CHECK_THAT(supp.intervals[0].upper.q_star, WithinAbs(-2.0 / 3.0, 1e-10));
    // Outside the support the root is real.
    const auto out = sp.solve(3.0);
    CHECK_FALSE(out.in_support);
    CHECK(out.q0.imag() == 0.0);
    CHECK(sp.density(3.0) == 0.0);
    CHECK_THROWS_AS(sp.solve(0.0), ValueError);
}

TEST_CASE("square-root edge behaviour", "[saddle]")
{
    const SaddlePoint sp(identity_spectrum(), AspectRatio(0.25));
    const auto edge = sp.support().intervals[0].upper;
    for (double d : {1e-4, 1e-5}) {
        const double rho = sp.density(edge.x - d);
        CHECK_THAT(rho / std::sqrt(d), WithinRel(edge.coefficient, 20.0 * std::sqrt(d)));
    }
}

TEST_CASE("separated spectra give several support components", "[saddle]")
{
    const EmpiricalSpectrum s({{1.0, 20}, {12.0, 20}});
    const SaddlePoint sp(s, AspectRatio(0.1));
    const auto supp = sp.support();
    REQUIRE(supp.intervals.size() == 2);
    CHECK_THAT(supp.intervals[0].mass, WithinAbs(0.5, 1e-14));
    CHECK_THAT(supp.intervals[1].mass, WithinAbs(0.5, 1e-14));
    CHECK(supp.intervals[0].upper.x < supp.intervals[1].lower.x);
    const double gap = 0.5 * (supp.intervals[0].upper.x + supp.intervals[1].lower.x);
    CHECK(sp.density(gap) == 0.0);
    CHECK_FALSE(supp.contains(gap));
    for (const auto& iv : supp.intervals) {
        CHECK_THAT(sp.integrate_density(iv.lower.x, iv.upper.x), WithinAbs(0.5, 1e-6));
    }
}

TEST_CASE("density is normalised for random spectra", "[saddle][property]")
{
    auto rng = make_stream(31, 0);
    std::uniform_real_distribution<double> gsq(0.05, 0.95);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_spectrum(rng);
        const SaddlePoint sp(s, AspectRatio(gsq(rng)));
        const auto supp = sp.support();
        double total = 0.0;
        double mass = 0.0;
        for (const auto& iv : supp.intervals) {
            total += sp.integrate_density(iv.lower.x, iv.upper.x);
            mass += iv.mass;
        }
        CHECK_THAT(total, WithinAbs(1.0, 1e-5));
        CHECK_THAT(mass, WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("derivatives of g agree with finite differences", "[saddle][property]")
{
    auto rng = make_stream(32, 0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_spectrum(rng);
        const SaddlePoint sp(s, AspectRatio(0.3));
        const std::complex<double> q(-0.3, 0.2 + 0.05 * trial);
        const double h = 1e-5;
        const auto d = sp.g_funcs(q);
        const auto dp = sp.g_funcs(q + h);
        const auto dm = sp.g_funcs(q - h);
        CHECK(std::abs((dp.g - dm.g) / (2 * h) - d.dg) < 1e-6 * (1 + std::abs(d.dg)));
        CHECK(std::abs((dp.dg - dm.dg) / (2 * h) - d.d2g) < 1e-6 * (1 + std::abs(d.d2g)));
    }
}

TEST_CASE("saddle quantities are exactly degeneracy invariant", "[saddle][property]")
{
    const EmpiricalSpectrum s({{0.4, 3}, {1.0, 30}, {2.2, 5}, {7.0, 2}});
    const AspectRatio a(0.4);
    const SaddlePoint base(s, a);
    const auto supp = base.support();
    for (std::size_t l : {2u, 3u, 5u}) {
        const SaddlePoint deg(expand_degeneracy(degenerate_spectrum(s, l)), a);
        for (double x = 0.05; x < 12.0; x += 0.37) {
            CHECK(deg.density(x) == base.density(x));
        }
        const auto dsupp = deg.support();
        REQUIRE(dsupp.intervals.size() == supp.intervals.size());
        for (std::size_t i = 0; i < supp.intervals.size(); ++i) {
            CHECK(dsupp.intervals[i].lower.x == supp.intervals[i].lower.x);
            CHECK(dsupp.intervals[i].upper.x == supp.intervals[i].upper.x);
            CHECK(dsupp.intervals[i].upper.coefficient == supp.intervals[i].upper.coefficient);
        }
    }
}

TEST_CASE("density grid", "[saddle]")
{
    const SaddlePoint sp(identity_spectrum(), AspectRatio(0.5));
    const auto grid = density_grid(sp, -1.0, 3.0, 5);
    REQUIRE(grid.size() == 5);
    CHECK(grid[0] == 0.0);
    CHECK(grid[1] == 0.0);
    CHECK_THAT(grid[2], WithinAbs(marchenko_pastur(1.0, 0.5), 1e-10));
}
