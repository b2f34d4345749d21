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

#include "cwishart/outliers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "cwishart/error.hpp"
#include "cwishart/random.hpp"

namespace cwishart {

namespace {

void check_outlier_index(const EmpiricalSpectrum& s, std::size_t o)
{
    if (o >= s.distinct()) {
        throw ValueError("outlier index out of range");
    }
    if (s.p() < 2) {
        throw ValueError("outlier expansion needs p >= 2");
    }
    if (s.distinct() < 2) {
        throw ValueError("outlier needs at least one other eigenvalue");
    }
}

/// (γ²/p) Σ_{j≠o} w(Λⱼ) over all other distinct values with weights.
template <class F>
double complement_sum(const EmpiricalSpectrum& s, std::size_t o, F&& term)
{
    const auto w = s.weights();
    double sum = 0.0;
    for (std::size_t j = 0; j < s.distinct(); ++j) {
        if (j != o) {
            sum += w[j] * term(s.values()[j]);
        }
    }
    return sum;
}

}  // namespace

double outlier_position(const EmpiricalSpectrum& s, std::size_t o,
                        AspectRatio a)
{
    check_outlier_index(s, o);
    const double lo = s.values()[o];
    const double sum = complement_sum(
        s, o, [lo](double lj) { return lj / (lo - lj); });
    return lo * (1.0 + a.gamma_sq() * sum);
}

OutlierWidth outlier_width(const EmpiricalSpectrum& s, std::size_t o,
                           AspectRatio a)
{
    check_outlier_index(s, o);
    const double lo = s.values()[o];
    OutlierWidth out;
    out.condition = a.gamma_sq() * complement_sum(s, o, [lo](double lj) {
                        const double r = lj / (lo - lj);
                        return r * r;
                    });
    const double radicand = 1.0 - out.condition;
    if (radicand > 0.0) {
        // p/(copies of Λₒ) equals 1/weight and is invariant under C ⊗ 1_l.
        const double p_o = 1.0 / s.weights()[o];
        out.width = 2.0 * a.gamma() * std::sqrt(radicand) * lo / std::sqrt(p_o);
        out.valid = true;
    }
    return out;
}

std::vector<OutlierReport> classify_outliers(const EmpiricalSpectrum& s,
                                             AspectRatio a,
                                             const SpectralSupport& support,
                                             const OutlierOptions& options)
{
    std::vector<OutlierReport> reports;
    if (support.intervals.empty() || s.distinct() < 2) {
        return reports;
    }
    std::vector<const SupportInterval*> bulk;
    for (const auto& iv : support.intervals) {
        if (iv.mass >= options.bulk_mass_threshold) {
            bulk.push_back(&iv);
        }
    }
    if (bulk.empty()) {
        bulk.push_back(&*std::max_element(
            support.intervals.begin(), support.intervals.end(),
            [](const auto& u, const auto& v) { return u.mass < v.mass; }));
    }
    auto in_bulk = [&](double x) {
        return std::any_of(bulk.begin(), bulk.end(),
                           [x](const auto* iv) { return iv->contains(x); });
    };
    auto distance_to_bulk = [&](double x) {
        double d = std::numeric_limits<double>::infinity();
        for (const auto* iv : bulk) {
            d = std::min(d, std::max(iv->lower.x - x, x - iv->upper.x));
        }
        return d;
    };

    for (const auto& iv : support.intervals) {
        const bool is_bulk =
            std::find(bulk.begin(), bulk.end(), &iv) != bulk.end();
        if (is_bulk) {
            continue;
        }
        for (std::size_t o : iv.poles) {
            OutlierReport r;
            r.index = o;
            r.lambda_o = s.values()[o];
            r.x0 = outlier_position(s, o, a);
            if (in_bulk(r.x0)) {
                continue;
            }
            const auto w = outlier_width(s, o, a);
            r.width = w.width;
            r.valid = w.valid;
            r.condition = w.condition;
            r.separated = w.valid && distance_to_bulk(r.x0) >
                                         options.separation_margin * *w.width;
            reports.push_back(r);
        }
    }
    std::sort(reports.begin(), reports.end(),
              [](const auto& u, const auto& v) { return u.x0 > v.x0; });
    return reports;
}

double goe2_density(double y)
{
    // Level density of the 2×2 GOE with weight exp(-tr H²/2), rescaled to
    // unit variance (the unscaled variance is 3/2).
    const double sigma = std::sqrt(1.5);
    const double lam = sigma * y;
    const double phi = std::exp(-0.5 * lam * lam) / std::sqrt(2.0 * std::numbers::pi);
    const double cdf = 0.5 * std::erfc(-lam / std::numbers::sqrt2);
    const double abs_moment = lam * (2.0 * cdf - 1.0) + 2.0 * phi;
    const double rho = std::exp(-0.5 * lam * lam) *
                       std::sqrt(2.0 * std::numbers::pi) * abs_moment /
                       (4.0 * std::sqrt(std::numbers::pi));
    return sigma * rho;
}

ShapeTable outlier_shape_reference(std::size_t l,
                                   const std::vector<double>& grid,
                                   std::size_t draws, std::uint64_t seed)
{
    ShapeTable out;
    out.grid = grid;
    out.density.resize(grid.size());
    if (l == 1) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            out.density[k] = std::exp(-0.5 * grid[k] * grid[k]) /
                             std::sqrt(2.0 * std::numbers::pi);
        }
        return out;
    }
    if (l == 2) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            out.density[k] = goe2_density(grid[k]);
        }
        return out;
    }
    if (l == goe_infinite_size) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double y = grid[k];
            out.density[k] =
                std::abs(y) < 2.0 ? std::sqrt(4.0 - y * y) / (2.0 * std::numbers::pi)
                                  : 0.0;
        }
        return out;
    }
    if (draws == 0) {
        throw ValueError("GOE shape reference needs at least one draw");
    }

    constexpr std::size_t bins = 200;
    constexpr double lo = -4.0;
    constexpr double hi = 4.0;
    const double width = (hi - lo) / bins;
    const double sigma = std::sqrt((static_cast<double>(l) + 1.0) / 2.0);
    std::vector<double> counts(bins, 0.0);
    const auto L = static_cast<Eigen::Index>(l);
    Eigen::MatrixXd h(L, L);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(L);
    for (std::size_t d = 0; d < draws; ++d) {
        Engine engine = make_stream(seed, d);
        std::normal_distribution<double> normal;
        for (Eigen::Index i = 0; i < L; ++i) {
            h(i, i) = normal(engine);
            for (Eigen::Index j = i + 1; j < L; ++j) {
                h(i, j) = h(j, i) = normal(engine) / std::numbers::sqrt2;
            }
        }
        solver.compute(h, Eigen::EigenvaluesOnly);
        for (Eigen::Index i = 0; i < L; ++i) {
            const double y = solver.eigenvalues()(i) / sigma;
            const auto b = static_cast<long>(std::floor((y - lo) / width));
            if (b >= 0 && b < static_cast<long>(bins)) {
                counts[static_cast<std::size_t>(b)] += 1.0;
            }
        }
    }
    const double norm = static_cast<double>(draws) * static_cast<double>(l) * width;
    for (auto& c : counts) {
        c /= norm;
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double pos = (grid[k] - lo) / width - 0.5;
        if (pos <= 0.0) {
            out.density[k] = grid[k] < lo ? 0.0 : counts.front();
        } else if (pos >= bins - 1) {
            out.density[k] = grid[k] > hi ? 0.0 : counts.back();
        } else {
            const auto b = static_cast<std::size_t>(pos);
            const double f = pos - static_cast<double>(b);
            out.density[k] = (1.0 - f) * counts[b] + f * counts[b + 1];
        }
    }
    return out;
}

}  // namespace cwishart
