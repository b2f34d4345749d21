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
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace cwishart {

/// Descriptive metadata of a Monte Carlo ensemble.
struct EnsembleMeta
{
    std::string c_hash;       ///< FNV-1a hash of the correlation matrix bytes
    std::size_t p = 0;        ///< dimension of C (before degeneracy)
    std::size_t n = 0;        ///< series length (before degeneracy)
    std::size_t l = 1;        ///< degeneracy factor
    std::size_t count = 0;    ///< number of samples
    std::uint64_t seed = 0;   ///< base seed

    std::size_t dimension() const noexcept { return p * l; }
};

/// Sorted eigenvalue samples, stored row-major (count × dimension).
class EigenvalueEnsemble
{
public:
    EigenvalueEnsemble() = default;
    EigenvalueEnsemble(EnsembleMeta meta, std::vector<double> data);

    const EnsembleMeta& meta() const noexcept { return meta_; }
    std::size_t count() const noexcept { return meta_.count; }
    std::size_t dimension() const noexcept { return meta_.dimension(); }
    std::span<const double> sample(std::size_t k) const;
    const std::vector<double>& data() const noexcept { return data_; }

private:
    EnsembleMeta meta_;
    std::vector<double> data_;
};

/// Draws eigenvalues of W Wᵀ with W = C^{1/2} X/√n, X a p×n standard
/// normal matrix.
class WishartSampler
{
public:
    /// C must be symmetric positive semidefinite (negative eigenvalues of
    /// magnitude ≤ 1e-10·‖C‖ are clipped), n ≥ p.
    WishartSampler(const Eigen::MatrixXd& c, std::size_t n);

    std::size_t p() const noexcept { return static_cast<std::size_t>(sqrt_c_.rows()); }
    std::size_t n() const noexcept { return n_; }

    /// Ascending eigenvalues of sample number `k` of stream `seed`; values
    /// below zero from rounding are clipped to 0.
    std::vector<double> sample(std::uint64_t seed, std::uint64_t k) const;

    /// Same as sample() but also returns the drawn W Wᵀ.
    Eigen::MatrixXd sample_matrix(std::uint64_t seed, std::uint64_t k) const;

private:
    Eigen::MatrixXd sqrt_c_;
    std::size_t n_;
};

/// One draw, `sample_wishart_eigs(C, n, seed)`.
std::vector<double> sample_wishart_eigs(const Eigen::MatrixXd& c,
                                        std::size_t n, std::uint64_t seed);

/// Options for run_ensemble.
struct EnsembleOptions
{
    std::size_t workers = 1;
    /// When set, the ensemble is streamed to this directory
    /// (meta.json + chunk-%04d.bin).
    std::optional<std::filesystem::path> out_dir;
    std::size_t chunk_size = 10000;
    /// Keep samples in memory (disable for very large streamed runs).
    bool keep_in_memory = true;
};

/// Ensemble for C ⊗ 1_l with series length l·n.  Sample k uses stream
/// (seed, k), so the result does not depend on the worker count.
EigenvalueEnsemble run_ensemble(const Eigen::MatrixXd& c, std::size_t n,
                                std::size_t l, std::size_t count,
                                std::uint64_t seed,
                                const EnsembleOptions& options = {});

/// Write / read the on-disk ensemble layout.  Chunks store little-endian
/// IEEE-754 doubles.
void save_ensemble(const EigenvalueEnsemble& e,
                   const std::filesystem::path& dir,
                   std::size_t chunk_size = 10000);
EigenvalueEnsemble load_ensemble(const std::filesystem::path& dir);

/// FNV-1a hash (hex) of a matrix's dimensions and entries.
std::string matrix_hash(const Eigen::MatrixXd& c);

/// Unit-integral histogram.
struct HistogramDensity
{
    std::vector<double> edges;    ///< bins + 1 edges
    std::vector<double> heights;  ///< normalised heights
    std::vector<double> counts;   ///< raw counts

    std::size_t bins() const noexcept { return heights.size(); }
    double center(std::size_t b) const { return 0.5 * (edges[b] + edges[b + 1]); }
    double width(std::size_t b) const { return edges[b + 1] - edges[b]; }
};

/// Histogram of the values inside [lo, hi], normalised to unit integral
/// over that range.
HistogramDensity histogram(std::span<const double> values, std::size_t bins,
                           double lo, double hi);

/// Histogram over all eigenvalues of every sample after removing the
/// `exclude_top` largest of each sample.  Without a range the span of the
/// retained values is used.
HistogramDensity histogram_density(const EigenvalueEnsemble& e,
                                   std::size_t bins,
                                   std::optional<std::pair<double, double>> range,
                                   std::size_t exclude_top);

enum class Extreme { largest, smallest };

/// Per-sample largest (after removing `exclude_top` top eigenvalues) or
/// smallest eigenvalue.
std::vector<double> extreme_samples(const EigenvalueEnsemble& e, Extreme which,
                                    std::size_t exclude_top);

/// Affine standardisation to zero mean and unit variance; `mirror` also
/// flips the sign (used for smallest eigenvalues).
std::vector<double> standardize(std::span<const double> samples,
                                bool mirror = false);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::span<const double> a, std::span<const double> b);

/// One-sample Kolmogorov-Smirnov statistic against a CDF.
double ks_distance(std::span<const double> a,
                   const std::function<double(double)>& cdf);

/// Total-variation distance between two histograms on identical bins.
double tv_distance(const HistogramDensity& a, const HistogramDensity& b);

/// Total-variation distance between a histogram and a density; the density
/// is averaged over each bin with Gauss-Legendre quadrature and normalised
/// on the histogram range.
double tv_distance(const HistogramDensity& h,
                   const std::function<double(double)>& density);

}  // namespace cwishart
