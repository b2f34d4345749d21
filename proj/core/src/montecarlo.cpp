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

#include "cwishart/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "cwishart/error.hpp"
#include "cwishart/random.hpp"
#include "cwishart/series.hpp"
#include "ensemble_io_detail.hpp"

namespace cwishart {

EigenvalueEnsemble::EigenvalueEnsemble(EnsembleMeta meta,
                                       std::vector<double> data)
    : meta_(std::move(meta)), data_(std::move(data))
{
    if (data_.size() != meta_.count * meta_.dimension()) {
        throw ValueError("ensemble data size does not match its metadata");
    }
}

std::span<const double> EigenvalueEnsemble::sample(std::size_t k) const
{
    if (k >= meta_.count) {
        throw ValueError("ensemble sample index out of range");
    }
    const std::size_t d = dimension();
    return {data_.data() + k * d, d};
}

WishartSampler::WishartSampler(const Eigen::MatrixXd& c, std::size_t n)
    : n_(n)
{
    if (c.rows() == 0 || c.rows() != c.cols()) {
        throw ValueError("correlation matrix must be square and nonempty");
    }
    if (n < static_cast<std::size_t>(c.rows())) {
        throw ValueError("n must be at least p");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c);
    if (solver.info() != Eigen::Success) {
        throw NumericError("eigendecomposition of C failed");
    }
    Eigen::VectorXd lam = solver.eigenvalues();
    const double top = std::max(lam.maxCoeff(), 0.0);
    if (lam.minCoeff() < -1e-10 * std::max(top, 1.0)) {
        throw ValueError("correlation matrix is not positive semidefinite");
    }
    lam = lam.cwiseMax(0.0).cwiseSqrt();
    sqrt_c_ = solver.eigenvectors() * lam.asDiagonal() *
              solver.eigenvectors().transpose();
}

Eigen::MatrixXd WishartSampler::sample_matrix(std::uint64_t seed,
                                              std::uint64_t k) const
{
    const auto p = sqrt_c_.rows();
    const auto n = static_cast<Eigen::Index>(n_);
    Engine engine = make_stream(seed, k);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd x(p, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < p; ++i) {
            x(i, j) = normal(engine);
        }
    }
    const Eigen::MatrixXd w = sqrt_c_ * x;
    Eigen::MatrixXd wwt = Eigen::MatrixXd::Zero(p, p);
    wwt.selfadjointView<Eigen::Lower>().rankUpdate(w, 1.0 / static_cast<double>(n_));
    wwt.triangularView<Eigen::StrictlyUpper>() = wwt.transpose();
    return wwt;
}

std::vector<double> WishartSampler::sample(std::uint64_t seed,
                                           std::uint64_t k) const
{
    const Eigen::MatrixXd wwt = sample_matrix(seed, k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        wwt, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericError("eigenvalue computation of W W^T failed");
    }
    std::vector<double> eigs(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + wwt.rows());
    std::sort(eigs.begin(), eigs.end());
    for (auto& v : eigs) {
        v = std::max(v, 0.0);
    }
    return eigs;
}

std::vector<double> sample_wishart_eigs(const Eigen::MatrixXd& c,
                                        std::size_t n, std::uint64_t seed)
{
    return WishartSampler(c, n).sample(seed, 0);
}

std::string matrix_hash(const Eigen::MatrixXd& c)
{
    std::uint64_t h = 14695981039346656037ULL;
    auto mix = [&h](const void* data, std::size_t size) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ULL;
        }
    };
    const std::int64_t dims[2] = {c.rows(), c.cols()};
    mix(dims, sizeof dims);
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
        for (Eigen::Index i = 0; i < c.rows(); ++i) {
            const double v = c(i, j);
            mix(&v, sizeof v);
        }
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

EigenvalueEnsemble run_ensemble(const Eigen::MatrixXd& c, std::size_t n,
                                std::size_t l, std::size_t count,
                                std::uint64_t seed,
                                const EnsembleOptions& options)
{
    if (count == 0) {
        throw ValueError("ensemble needs at least one sample");
    }
    if (l == 0) {
        throw ValueError("degeneracy factor must be a positive integer");
    }
    const WishartSampler sampler(l == 1 ? c : kron_identity(c, l), n * l);
    EnsembleMeta meta;
    meta.c_hash = matrix_hash(c);
    meta.p = static_cast<std::size_t>(c.rows());
    meta.n = n;
    meta.l = l;
    meta.count = count;
    meta.seed = seed;
    const std::size_t dim = meta.dimension();
    const std::size_t chunk = std::max<std::size_t>(1, options.chunk_size);
    const std::size_t workers = std::max<std::size_t>(1, options.workers);

    if (options.out_dir) {
        std::error_code ec;
        std::filesystem::create_directories(*options.out_dir, ec);
        if (ec) {
            throw IoError("cannot create ensemble directory " +
                          options.out_dir->string() + ": " + ec.message());
        }
    }

    std::vector<double> all;
    if (options.keep_in_memory) {
        all.reserve(count * dim);
    }
    std::vector<double> buffer;
    for (std::size_t start = 0, index = 0; start < count; start += chunk, ++index) {
        const std::size_t size = std::min(chunk, count - start);
        buffer.assign(size * dim, 0.0);
        auto work = [&](std::size_t w) {
            for (std::size_t k = w; k < size; k += workers) {
                const auto eigs = sampler.sample(seed, start + k);
                std::copy(eigs.begin(), eigs.end(), buffer.begin() + k * dim);
            }
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::jthread> pool;
            for (std::size_t w = 0; w < workers; ++w) {
                pool.emplace_back(work, w);
            }
        }
        if (options.out_dir) {
            detail::write_chunk_file(*options.out_dir, index, buffer);
        }
        if (options.keep_in_memory) {
            all.insert(all.end(), buffer.begin(), buffer.end());
        }
    }
    if (options.out_dir) {
        detail::write_meta_file(*options.out_dir, meta, chunk);
    }
    if (!options.keep_in_memory) {
        meta.count = 0;
    }
    return EigenvalueEnsemble(meta, std::move(all));
}

HistogramDensity histogram(std::span<const double> values, std::size_t bins,
                           double lo, double hi)
{
    if (bins == 0) {
        throw ValueError("histogram needs at least one bin");
    }
    if (!(hi > lo)) {
        throw ValueError("histogram range must have hi > lo");
    }
    HistogramDensity h;
    h.edges.resize(bins + 1);
    for (std::size_t b = 0; b <= bins; ++b) {
        h.edges[b] = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins);
    }
    h.counts.assign(bins, 0.0);
    const double width = (hi - lo) / static_cast<double>(bins);
    double total = 0.0;
    for (double v : values) {
        if (v < lo || v > hi) {
            continue;
        }
        auto b = static_cast<std::size_t>((v - lo) / width);
        b = std::min(b, bins - 1);
        h.counts[b] += 1.0;
        total += 1.0;
    }
    if (total == 0.0) {
        throw ValueError("histogram range contains no values");
    }
    h.heights.resize(bins);
    for (std::size_t b = 0; b < bins; ++b) {
        h.heights[b] = h.counts[b] / (total * h.width(b));
    }
    return h;
}

HistogramDensity histogram_density(const EigenvalueEnsemble& e,
                                   std::size_t bins,
                                   std::optional<std::pair<double, double>> range,
                                   std::size_t exclude_top)
{
    const std::size_t dim = e.dimension();
    if (exclude_top >= dim || e.count() == 0) {
        throw ValueError("no eigenvalues retained for the histogram");
    }
    const std::size_t keep = dim - exclude_top;
    std::vector<double> values;
    values.reserve(e.count() * keep);
    for (std::size_t k = 0; k < e.count(); ++k) {
        const auto s = e.sample(k);
        values.insert(values.end(), s.begin(), s.begin() + static_cast<long>(keep));
    }
    double lo = 0.0;
    double hi = 0.0;
    if (range) {
        lo = range->first;
        hi = range->second;
    } else {
        const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
        lo = *mn;
        hi = *mx;
        if (hi <= lo) {
            hi = lo + 1.0;
        }
    }
    return histogram(values, bins, lo, hi);
}

std::vector<double> extreme_samples(const EigenvalueEnsemble& e, Extreme which,
                                    std::size_t exclude_top)
{
    const std::size_t dim = e.dimension();
    if (exclude_top >= dim) {
        throw ValueError("exclude_top must be smaller than the dimension");
    }
    std::vector<double> out(e.count());
    for (std::size_t k = 0; k < e.count(); ++k) {
        const auto s = e.sample(k);
        out[k] = which == Extreme::largest ? s[dim - 1 - exclude_top] : s[0];
    }
    return out;
}

std::vector<double> standardize(std::span<const double> samples, bool mirror)
{
    if (samples.size() < 2) {
        throw ValueError("standardisation needs at least two samples");
    }
    const double n = static_cast<double>(samples.size());
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double var = 0.0;
    for (double v : samples) {
        var += (v - mean) * (v - mean);
    }
    var /= n;
    if (!(var > 0.0)) {
        throw ValueError("cannot standardise samples with zero variance");
    }
    const double scale = (mirror ? -1.0 : 1.0) / std::sqrt(var);
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out[i] = (samples[i] - mean) * scale;
    }
    return out;
}

double ks_distance(std::span<const double> a, std::span<const double> b)
{
    if (a.empty() || b.empty()) {
        throw ValueError("KS distance needs nonempty samples");
    }
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) {
            ++i;
        }
        while (j < y.size() && y[j] == v) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / nx -
                                 static_cast<double>(j) / ny));
    }
    return d;
}

double ks_distance(std::span<const double> a,
                   const std::function<double(double)>& cdf)
{
    if (a.empty()) {
        throw ValueError("KS distance needs a nonempty sample");
    }
    std::vector<double> x(a.begin(), a.end());
    std::sort(x.begin(), x.end());
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = cdf(x[i]);
        d = std::max({d, f - static_cast<double>(i) / n,
                      static_cast<double>(i + 1) / n - f});
    }
    return d;
}

double tv_distance(const HistogramDensity& a, const HistogramDensity& b)
{
    if (a.edges != b.edges) {
        throw ValueError("TV distance needs histograms with identical bins");
    }
    double d = 0.0;
    for (std::size_t k = 0; k < a.bins(); ++k) {
        d += std::abs(a.heights[k] - b.heights[k]) * a.width(k);
    }
    return 0.5 * d;
}

double tv_distance(const HistogramDensity& h,
                   const std::function<double(double)>& density)
{
    // 8-point Gauss-Legendre nodes and weights on [-1, 1].
    static constexpr double nodes[4] = {0.1834346424956498, 0.5255324099163290,
                                        0.7966664774136267, 0.9602898564975363};
    static constexpr double weights[4] = {0.3626837833783620, 0.3137066458778873,
                                          0.2223810344533745, 0.1012285362903763};
    std::vector<double> ref(h.bins(), 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < h.bins(); ++k) {
        const double c = h.center(k);
        const double half = 0.5 * h.width(k);
        double s = 0.0;
        for (int i = 0; i < 4; ++i) {
            s += weights[i] * (density(c - half * nodes[i]) + density(c + half * nodes[i]));
        }
        ref[k] = 0.5 * s;  // bin average
        total += ref[k] * h.width(k);
    }
    if (!(total > 0.0)) {
        throw ValueError("reference density vanishes on the histogram range");
    }
    double d = 0.0;
    for (std::size_t k = 0; k < h.bins(); ++k) {
        d += std::abs(h.heights[k] - ref[k] / total) * h.width(k);
    }
    return 0.5 * d;
}

}  // namespace cwishart
