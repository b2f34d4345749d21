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
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cwishart/spectrum.hpp"

namespace cwishart {

/// p×n matrix of real time series: one series per row.
using TimeSeriesMatrix = Eigen::MatrixXd;

/// Symmetric positive semidefinite p×p correlation matrix with a cache of
/// its ascending eigenvalues.
class CorrelationMatrix
{
public:
    /// Validates symmetry (1e-12 relative) and positive semidefiniteness
    /// (eigenvalues ≥ -1e-10 relative to the largest one).
    explicit CorrelationMatrix(Eigen::MatrixXd entries);

    const Eigen::MatrixXd& entries() const noexcept { return entries_; }
    const Eigen::VectorXd& eigenvalues() const noexcept { return eigs_; }
    std::size_t dimension() const noexcept
    {
        return static_cast<std::size_t>(entries_.rows());
    }

    /// Empirical spectrum built from the (clipped, strictly positive)
    /// eigenvalues.  Throws ValueError when C is singular.
    EmpiricalSpectrum spectrum(std::size_t degeneracy_l = 1) const;

private:
    Eigen::MatrixXd entries_;
    Eigen::VectorXd eigs_;
};

/// One-factor synthetic data: T = T₀ + s_noise·T₁.
struct OneFactorConfig
{
    std::vector<std::size_t> block_sizes;  ///< correlated sector sizes
    std::size_t n = 0;                     ///< series length
    double s_noise = 0.0;                  ///< noise strength
    std::uint64_t seed = 0;                ///< RNG seed

    std::size_t p() const;
    void validate() const;
};

/// Generate a one-factor time-series matrix.
///
/// T = T₀ + (s_noise/√n)·T₁: every row of T₀ inside a block equals that
/// block's standard-normal factor series and T₁ is i.i.d. standard normal.
/// The result is a deterministic function of the configuration.
TimeSeriesMatrix one_factor_series(const OneFactorConfig& cfg);

/// Pearson correlation with 1/n normalisation: rows centred, scaled to unit
/// sample variance, C = T̃T̃ᵀ/n with an exactly unit diagonal.
/// Throws ValueError naming the first zero-variance row.
CorrelationMatrix estimate_correlation(const TimeSeriesMatrix& t);

/// C ⊗ 1_l.
Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& c, std::size_t l);

/// Diagonal correlation matrix with the flattened eigenvalues of `s`.
Eigen::MatrixXd diagonal_matrix(const EmpiricalSpectrum& s);

/// Read comma-separated time series (one series per row, optional header
/// row of non-numeric labels).
TimeSeriesMatrix parse_series_csv(std::istream& in,
                                  const std::string& source = "<stream>");
TimeSeriesMatrix load_series_csv(const std::filesystem::path& path);

/// Write a matrix as comma-separated rows with full precision.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

}  // namespace cwishart
