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
#include <filesystem>
#include <numeric>

#include "cwishart/error.hpp"
#include "cwishart/montecarlo.hpp"
#include "cwishart/saddle.hpp"
#include "cwishart/series.hpp"

using namespace cwishart;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("cwishart-test-" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

Eigen::MatrixXd small_c()
{
    Eigen::MatrixXd c(3, 3);
    c << 1.0, 0.4, 0.1, 0.4, 1.0, 0.2, 0.1, 0.2, 1.0;
    return c;
}

}  // namespace

TEST_CASE("samples are sorted, nonnegative and reproducible", "[montecarlo]")
{
    const WishartSampler sampler(small_c(), 10);
    const auto a = sampler.sample(5, 17);
    const auto b = sampler.sample(5, 17);
    const auto c = sampler.sample(5, 18);
    CHECK(a == b);
    CHECK(a != c);
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(a.front() >= 0.0);
    CHECK(sample_wishart_eigs(small_c(), 10, 5) == sampler.sample(5, 0));
}

TEST_CASE("sample covariance is unbiased", "[montecarlo]")
{
    const WishartSampler sampler(small_c(), 8);
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(3, 3);
    const int draws = 20000;
    for (int k = 0; k < draws; ++k) {
        mean += sampler.sample_matrix(1, static_cast<std::uint64_t>(k));
    }
    mean /= draws;
    CHECK((mean - small_c()).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("ensembles do not depend on the worker count", "[montecarlo][property]")
{
    const auto one = run_ensemble(small_c(), 10, 2, 257, 3);
    EnsembleOptions opts;
    opts.workers = 3;
    opts.chunk_size = 50;
    const auto three = run_ensemble(small_c(), 10, 2, 257, 3, opts);
    CHECK(one.data() == three.data());
    CHECK(one.dimension() == 6);
    CHECK(one.meta().l == 2);
    CHECK(one.meta().c_hash == matrix_hash(small_c()));
}

TEST_CASE("ensembles round-trip through the chunked layout", "[montecarlo][io]")
{
    const auto dir = scratch_dir("roundtrip");
    EnsembleOptions opts;
    opts.out_dir = dir;
    opts.chunk_size = 40;
    const auto e = run_ensemble(small_c(), 12, 1, 130, 8, opts);
    CHECK(std::filesystem::exists(dir / "meta.json"));
    CHECK(std::filesystem::exists(dir / "chunk-0000.bin"));
    CHECK(std::filesystem::exists(dir / "chunk-0003.bin"));
    const auto back = load_ensemble(dir);
    CHECK(back.data() == e.data());
    CHECK(back.meta().seed == 8);
    CHECK(back.meta().n == 12);

    const auto other = scratch_dir("saved");
    save_ensemble(e, other, 64);
    CHECK(load_ensemble(other).data() == e.data());
    std::filesystem::remove(other / "chunk-0001.bin");
    CHECK_THROWS_AS(load_ensemble(other), IoError);
    CHECK_THROWS_AS(load_ensemble(scratch_dir("missing")), IoError);
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(other);
}

TEST_CASE("matrix hash distinguishes matrices", "[montecarlo]")
{
    auto c = small_c();
    const auto h = matrix_hash(c);
    CHECK(h == matrix_hash(small_c()));
    c(0, 1) = std::nextafter(c(0, 1), 1.0);
    CHECK(h != matrix_hash(c));
}

TEST_CASE("histograms have unit integral", "[montecarlo][stats]")
{
    std::vector<double> v;
    for (int i = 0; i < 1000; ++i) {
        v.push_back(std::sin(i * 0.37));
    }
    const auto h = histogram(v, 17, -1.0, 1.0);
    double area = 0.0;
    for (std::size_t b = 0; b < h.bins(); ++b) {
        area += h.heights[b] * h.width(b);
    }
    CHECK_THAT(area, WithinAbs(1.0, 1e-12));
    CHECK_THROWS_AS(histogram(v, 0, 0.0, 1.0), ValueError);
    CHECK_THROWS_AS(histogram(v, 10, 5.0, 6.0), ValueError);
}

TEST_CASE("distance measures", "[montecarlo][stats]")
{
    std::vector<double> a(1000);
    std::iota(a.begin(), a.end(), 0.0);
    std::vector<double> b = a;
    CHECK(ks_distance(a, b) == 0.0);
    for (auto& x : b) {
        x += 5000.0;
    }
    CHECK(ks_distance(a, b) == 1.0);
    std::vector<double> u(1000);
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = (static_cast<double>(i) + 0.5) / 1000.0;
    }
    CHECK_THAT(ks_distance(u, [](double x) { return std::clamp(x, 0.0, 1.0); }),
               WithinAbs(0.0005, 1e-12));
    const auto hu = histogram(u, 10, 0.0, 1.0);
    CHECK_THAT(tv_distance(hu, hu), WithinAbs(0.0, 1e-15));
    CHECK_THAT(tv_distance(hu, [](double) { return 1.0; }), WithinAbs(0.0, 1e-12));
    CHECK_THAT(tv_distance(hu, [](double x) { return 2.0 * x; }), WithinAbs(0.25, 1e-3));
}

TEST_CASE("standardisation and extremes", "[montecarlo][stats]")
{
    const auto e = run_ensemble(small_c(), 20, 1, 500, 2);
    const auto top = extreme_samples(e, Extreme::largest, 0);
    const auto second = extreme_samples(e, Extreme::largest, 1);
    const auto bottom = extreme_samples(e, Extreme::smallest, 0);
    for (std::size_t k = 0; k < e.count(); ++k) {
        CHECK(top[k] >= second[k]);
        CHECK(second[k] >= bottom[k]);
    }
    const auto z = standardize(top);
    const double mean = std::accumulate(z.begin(), z.end(), 0.0) / z.size();
    double var = 0.0;
    for (double v : z) {
        var += v * v;
    }
    var /= z.size();
    CHECK_THAT(mean, WithinAbs(0.0, 1e-12));
    CHECK_THAT(var, WithinAbs(1.0, 1e-12));
    const auto m = standardize(top, true);
    CHECK(m[0] == -z[0]);
    CHECK_THROWS_AS(extreme_samples(e, Extreme::largest, 3), ValueError);
}

TEST_CASE("Monte Carlo density matches Marchenko-Pastur", "[montecarlo][oracle]")
{
    const Eigen::MatrixXd c = Eigen::MatrixXd::Identity(40, 40);
    EnsembleOptions opts;
    opts.workers = 2;
    const auto e = run_ensemble(c, 100, 1, 3000, 12, opts);
    const SaddlePoint sp(EmpiricalSpectrum({{1.0, 40}}), AspectRatio(0.4));
    const auto supp = sp.support();
    const auto h = histogram_density(e, 60, std::make_pair(0.0, supp.upper() + 0.5), 0);
    CHECK(tv_distance(h, [&](double x) { return sp.density(x); }) < 0.05);
}
