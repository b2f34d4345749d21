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

#include <random>

#include <benchmark/benchmark.h>

#include "cwishart/gapcdf.hpp"
#include "cwishart/localstats.hpp"
#include "cwishart/montecarlo.hpp"
#include "cwishart/random.hpp"
#include "cwishart/saddle.hpp"
#include "cwishart/series.hpp"

using namespace cwishart;

namespace {

const CorrelationMatrix& recipe_correlation()
{
    static const CorrelationMatrix c =
        estimate_correlation(one_factor_series(OneFactorConfig{{20, 12, 8}, 100, 4.0, 1}));
    return c;
}

void BM_SaddleDensityGrid(benchmark::State& state)
{
    const SaddlePoint sp(recipe_correlation().spectrum(), AspectRatio(0.4));
    const auto points = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(density_grid(sp, 0.0, 12.0, points));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SaddleDensityGrid)->Arg(600)->Arg(6000);

void BM_Support(benchmark::State& state)
{
    const SaddlePoint sp(recipe_correlation().spectrum(), AspectRatio(0.4));
    for (auto _ : state) {
        benchmark::DoNotOptimize(sp.support());
    }
}
BENCHMARK(BM_Support);

void BM_Pfaffian(benchmark::State& state)
{
    const auto dim = state.range(0);
    auto rng = make_stream(1, 0);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = i + 1; j < dim; ++j) {
            a(i, j) = normal(rng);
            a(j, i) = -a(i, j);
        }
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(log_pfaffian(a));
    }
}
BENCHMARK(BM_Pfaffian)->Arg(4)->Arg(16)->Arg(64)->Arg(256);

void BM_GapCdf(benchmark::State& state)
{
    const std::vector<double> small{1.0, 2.0};
    const std::vector<double> large{0.5, 1.0, 2.0, 4.0};
    const bool big = state.range(0) != 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(big ? gap_cdf(12.0, large, 10) : gap_cdf(6.0, small, 6));
    }
}
BENCHMARK(BM_GapCdf)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_WishartSample(benchmark::State& state)
{
    const WishartSampler sampler(kron_identity(recipe_correlation().entries(),
                                               static_cast<std::size_t>(state.range(0))),
                                 100 * static_cast<std::size_t>(state.range(0)));
    std::uint64_t k = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sampler.sample(7, k++));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_WishartSample)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

void BM_GoeSpacings(benchmark::State& state)
{
    GoeSpacingOptions opts;
    opts.draws = 100;
    for (auto _ : state) {
        benchmark::DoNotOptimize(goe_spacings(opts));
    }
}
BENCHMARK(BM_GoeSpacings)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
