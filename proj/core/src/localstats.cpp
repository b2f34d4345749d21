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

#include "cwishart/localstats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include <boost/math/special_functions/gamma.hpp>
#include <Eigen/Eigenvalues>

#include "cwishart/error.hpp"
#include "cwishart/random.hpp"

namespace cwishart {

namespace {

constexpr double tw_shift = 8.93;
constexpr double tw_rate = 8.93;
constexpr double tw_power = 78.66;

void require_bulk(const SaddlePoint& sp, double x)
{
    if (!(x > 0.0) || sp.solve(x).q0.imag() <= sp.support_threshold()) {
        throw ValueError("not in bulk: R1(" + std::to_string(x) +
                         ") is below the support threshold");
    }
}

}  // namespace

UnfoldedSample unfold_bulk(std::span<const double> eigs, double x,
                           const SaddlePoint& sp, std::size_t dimension,
                           double window)
{
    require_bulk(sp, x);
    UnfoldedSample out;
    out.x = x;
    out.scale = sp.density(x) * static_cast<double>(dimension);
    for (double lambda : eigs) {
        const double xi = out.scale * (lambda - x);
        if (std::abs(xi) <= window) {
            out.values.push_back(xi);
        }
    }
    std::sort(out.values.begin(), out.values.end());
    return out;
}

UnfoldedSample unfold_bulk(std::span<const double> eigs, double x,
                           const EmpiricalSpectrum& s, AspectRatio a,
                           double window)
{
    return unfold_bulk(eigs, x, SaddlePoint(s, a), s.effective_dimension(),
                       window);
}

BulkUnfolder::BulkUnfolder(const SaddlePoint& sp, double x,
                           std::size_t dimension, double window)
    : x_(x), dimension_(static_cast<double>(dimension)), window_(window)
{
    require_bulk(sp, x);
    r1_ = sp.density(x);
    // Tabulate a region comfortably wider than the window in linear units;
    // the lookup clamps values that fall outside it.
    const double half = 2.0 * window / (r1_ * dimension_);
    lo_ = std::max(x - half, 1e-300);
    hi_ = x + half;
    constexpr std::size_t points = 801;
    grid_.resize(points);
    cumulative_.resize(points);
    const std::size_t centre = points / 2;
    for (std::size_t i = 0; i < centre; ++i) {
        grid_[i] = lo_ + (x - lo_) * static_cast<double>(i) / centre;
    }
    for (std::size_t i = centre; i < points; ++i) {
        grid_[i] = x + (hi_ - x) * static_cast<double>(i - centre) / (points - 1 - centre);
    }
    cumulative_[centre] = 0.0;
    for (std::size_t i = centre + 1; i < points; ++i) {
        cumulative_[i] = cumulative_[i - 1] +
                         dimension_ * sp.integrate_density(grid_[i - 1], grid_[i]);
    }
    for (std::size_t i = centre; i-- > 0;) {
        cumulative_[i] = cumulative_[i + 1] -
                         dimension_ * sp.integrate_density(grid_[i], grid_[i + 1]);
    }
}

double BulkUnfolder::unfold_one(double lambda) const
{
    if (lambda <= lo_) {
        return cumulative_.front() - 1e300;
    }
    if (lambda >= hi_) {
        return cumulative_.back() + 1e300;
    }
    const auto it = std::upper_bound(grid_.begin(), grid_.end(), lambda);
    const std::size_t i = static_cast<std::size_t>(it - grid_.begin()) - 1;
    const double f = (lambda - grid_[i]) / (grid_[i + 1] - grid_[i]);
    return cumulative_[i] + f * (cumulative_[i + 1] - cumulative_[i]);
}

UnfoldedSample BulkUnfolder::unfold(std::span<const double> eigs) const
{
    UnfoldedSample out;
    out.x = x_;
    out.scale = r1_ * dimension_;
    for (double lambda : eigs) {
        const double xi = unfold_one(lambda);
        if (std::abs(xi) <= window_) {
            out.values.push_back(xi);
        }
    }
    std::sort(out.values.begin(), out.values.end());
    return out;
}

std::vector<double> BulkUnfolder::spacings(const EigenvalueEnsemble& e) const
{
    std::vector<double> out;
    out.reserve(e.count() * static_cast<std::size_t>(2.0 * window_));
    for (std::size_t k = 0; k < e.count(); ++k) {
        const auto s = nearest_neighbor_spacings(unfold(e.sample(k)));
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

double bulk_center(const SaddlePoint& sp)
{
    const auto supp = sp.support();
    if (supp.intervals.empty()) {
        throw NumericError("bulk_center: empty support");
    }
    const auto& main = *std::max_element(
        supp.intervals.begin(), supp.intervals.end(),
        [](const SupportInterval& a, const SupportInterval& b) { return a.mass < b.mass; });
    double lo = main.lower.x;
    double hi = main.upper.x;
    const double total = sp.integrate_density(lo, hi);
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (sp.integrate_density(main.lower.x, mid) < 0.5 * total) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<double> nearest_neighbor_spacings(const UnfoldedSample& u)
{
    std::vector<double> out;
    if (u.values.size() < 2) {
        return out;
    }
    out.reserve(u.values.size() - 1);
    for (std::size_t i = 1; i < u.values.size(); ++i) {
        out.push_back(u.values[i] - u.values[i - 1]);
    }
    return out;
}

double wigner_surmise(double s)
{
    if (s < 0.0) {
        throw ValueError("wigner_surmise requires s >= 0");
    }
    return 0.5 * std::numbers::pi * s * std::exp(-0.25 * std::numbers::pi * s * s);
}

double wigner_surmise_cdf(double s)
{
    if (s <= 0.0) {
        return 0.0;
    }
    return -std::expm1(-0.25 * std::numbers::pi * s * s);
}

double edge_bracket(const EmpiricalSpectrum& s, AspectRatio a, double q_star)
{
    const auto w = s.weights();
    const auto& lam = s.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < lam.size(); ++i) {
        const double d = 1.0 + lam[i] * q_star;
        sum += w[i] * lam[i] * lam[i] * lam[i] / (d * d * d);
    }
    return a.gamma_sq() * sum - 1.0 / (q_star * q_star * q_star);
}

double edge_scale(const EmpiricalSpectrum& s, AspectRatio a, double x_edge,
                  double q_star)
{
    (void)x_edge;
    const double bracket = edge_bracket(s, a, q_star);
    if (!(bracket > 0.0) || !std::isfinite(bracket)) {
        throw ValueError("invalid edge expansion: third-moment bracket is not "
                         "positive");
    }
    return std::cbrt(1.0 / bracket) / std::pow(a.gamma_sq(), 2.0 / 3.0);
}

UnfoldedSample unfold_edge(std::span<const double> samples, double x_edge,
                           double scale, std::size_t dimension)
{
    if (!(scale > 0.0) || !std::isfinite(scale)) {
        throw ValueError("unfold_edge requires a finite positive scale");
    }
    UnfoldedSample out;
    out.x = x_edge;
    out.scale = scale;
    const double factor = scale * std::pow(static_cast<double>(dimension), 2.0 / 3.0);
    out.values.reserve(samples.size());
    for (double lambda : samples) {
        out.values.push_back(factor * (lambda - x_edge));
    }
    std::sort(out.values.begin(), out.values.end());
    return out;
}

double tw_approx(double t)
{
    if (t <= -tw_shift) {
        return 0.0;
    }
    // Shifted gamma density with shape tw_power + 1 and rate tw_rate; the
    // normalisation is evaluated in log space (≈ 6.40e-76 overall).
    const double k = tw_power + 1.0;
    const double log_density = k * std::log(tw_rate) - std::lgamma(k) +
                               tw_power * std::log(t + tw_shift) - tw_rate * (t + tw_shift);
    return std::exp(log_density);
}

double tw_approx_cdf(double t)
{
    if (t <= -tw_shift) {
        return 0.0;
    }
    return boost::math::gamma_p(tw_power + 1.0, tw_rate * (t + tw_shift));
}

HistogramDensity spacing_histogram(std::span<const double> spacings,
                                   std::size_t bins, double s_max)
{
    if (spacings.size() < 100) {
        throw ValueError("too few spacings for a histogram (need >= 100, got " +
                         std::to_string(spacings.size()) + ")");
    }
    return histogram(spacings, bins, 0.0, s_max);
}

std::vector<double> goe_spacings(const GoeSpacingOptions& options)
{
    const std::size_t n = options.size;
    if (n < 8) {
        throw ValueError("goe_spacings requires a matrix size of at least 8");
    }
    const double radius = std::sqrt(2.0 * static_cast<double>(n));
    const auto counting = [&](double lambda) {
        const double u = std::clamp(lambda / radius, -1.0, 1.0);
        return static_cast<double>(n) *
               (0.5 + (u * std::sqrt(1.0 - u * u) + std::asin(u)) / std::numbers::pi);
    };
    const std::size_t first = 3 * n / 8;
    const std::size_t last = 5 * n / 8;
    std::vector<double> out;
    out.reserve(options.draws * (last - first));
    Eigen::VectorXd diag(static_cast<Eigen::Index>(n));
    Eigen::VectorXd sub(static_cast<Eigen::Index>(n - 1));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    for (std::size_t d = 0; d < options.draws; ++d) {
        auto rng = make_stream(options.seed, d);
        std::normal_distribution<double> normal;
        for (std::size_t i = 0; i < n; ++i) {
            diag(static_cast<Eigen::Index>(i)) = normal(rng);
        }
        for (std::size_t k = 1; k < n; ++k) {
            std::chi_squared_distribution<double> chi2(static_cast<double>(n - k));
            sub(static_cast<Eigen::Index>(k - 1)) = std::sqrt(0.5 * chi2(rng));
        }
        solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
        const auto& ev = solver.eigenvalues();
        for (std::size_t i = first; i < last; ++i) {
            out.push_back(counting(ev(static_cast<Eigen::Index>(i + 1))) -
                          counting(ev(static_cast<Eigen::Index>(i))));
        }
    }
    return out;
}

std::vector<double> poisson_spacings(std::size_t count, std::uint64_t seed)
{
    auto rng = make_stream(seed, 0);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> out(count);
    for (auto& v : out) {
        v = expo(rng);
    }
    return out;
}

std::vector<double> normalize_mean(std::span<const double> spacings)
{
    if (spacings.empty()) {
        throw ValueError("normalize_mean requires at least one spacing");
    }
    const double mean = std::accumulate(spacings.begin(), spacings.end(), 0.0) /
                        static_cast<double>(spacings.size());
    std::vector<double> out(spacings.begin(), spacings.end());
    for (auto& v : out) {
        v /= mean;
    }
    return out;
}

}  // namespace cwishart
