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
#include <optional>
#include <vector>

#include "cwishart/saddle.hpp"
#include "cwishart/spectrum.hpp"

namespace cwishart {

/// Prediction for one spectrum outlier.
struct OutlierReport
{
    std::size_t index = 0;        ///< index into EmpiricalSpectrum::values()
    double lambda_o = 0.0;        ///< the outlying empirical eigenvalue Λₒ
    double x0 = 0.0;              ///< predicted peak position
    std::optional<double> width;  ///< Δx₀, present iff valid
    bool valid = false;           ///< fluctuation expansion applicable
    bool separated = false;       ///< x₀ farther than margin·Δx₀ from the bulk
    double condition = 0.0;       ///< (γ²/p)Σ_{j≠o} Λⱼ²/(Λₒ-Λⱼ)², valid iff < 1
};

/// Result of the width formula.
struct OutlierWidth
{
    std::optional<double> width;
    bool valid = false;
    double condition = 0.0;
};

/// Tunable parts of outlier classification.
struct OutlierOptions
{
    /// Support components carrying at least this fraction of the level
    /// density form the bulk; lighter components are outlier candidates.
    double bulk_mass_threshold = 0.25;
    /// Separation margin in units of Δx₀.
    double separation_margin = 1.0;
};

/// Limiting position x₀ = Λₒ(1 + (γ²/p)Σ_{j≠o} Λⱼ/(Λₒ - Λⱼ)).
///
/// `o` indexes the distinct values.  All copies of Λₒ (its multiplicity
/// times the degeneracy factor) form the outlier; the sum runs over every
/// other eigenvalue with multiplicity.  Throws ValueError when p < 2 or o
/// is out of range.
double outlier_position(const EmpiricalSpectrum& s, std::size_t o,
                        AspectRatio a);

/// Fluctuation width Δx₀ = 2γ√(1 - (γ²/p)Σ_{j≠o}Λⱼ²/(Λₒ-Λⱼ)²)·Λₒ/√pₒ with
/// pₒ = p/(number of copies of Λₒ); invalid when the radicand is ≤ 0.
OutlierWidth outlier_width(const EmpiricalSpectrum& s, std::size_t o,
                           AspectRatio a);

/// Outlier candidates are the distinct values whose poles fall into a
/// light support component and whose predicted x₀ lies outside every bulk
/// interval.  Reports are sorted by x₀, largest first.
std::vector<OutlierReport> classify_outliers(const EmpiricalSpectrum& s,
                                             AspectRatio a,
                                             const SpectralSupport& support,
                                             const OutlierOptions& options = {});

/// Standardised (zero mean, unit variance) level density of the l×l
/// Gaussian orthogonal ensemble, the shape of an l-fold degenerate outlier.
struct ShapeTable
{
    std::vector<double> grid;
    std::vector<double> density;
};

/// Sentinel for the l → ∞ limit (semicircle).
inline constexpr std::size_t goe_infinite_size = 0;

/// l = 1 and l = 2 use closed forms, l = goe_infinite_size the semicircle,
/// other l a histogram of `draws` sampled GOE matrices (200 bins on
/// [-4, 4]) interpolated on the grid.
ShapeTable outlier_shape_reference(std::size_t l,
                                   const std::vector<double>& grid,
                                   std::size_t draws = 1000000,
                                   std::uint64_t seed = 1);

/// Closed-form standardised level density of the 2×2 GOE.
double goe2_density(double y);

}  // namespace cwishart
