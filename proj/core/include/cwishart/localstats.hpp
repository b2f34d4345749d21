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
#include <span>
#include <vector>

#include "cwishart/montecarlo.hpp"
#include "cwishart/saddle.hpp"
#include "cwishart/spectrum.hpp"

namespace cwishart {

/// Eigenvalues rescaled to unit mean density around a reference point.
struct UnfoldedSample
{
    double x = 0.0;              ///< reference point (bulk x or soft edge)
    std::vector<double> values;  ///< unfolded values ξ̂, ascending
    double scale = 0.0;          ///< multiplicative scale that was applied
};

/// Linear bulk unfolding ξ̂ = R₁(x)·(lp)·(λ - x) of the eigenvalues whose
/// unfolded value lies within ±`window` mean spacings of x.  `eigs` must be
/// one sorted sample of the l·p dimensional ensemble.  Throws ValueError
/// with "not in bulk" when R₁(x) is below the support threshold.
UnfoldedSample unfold_bulk(std::span<const double> eigs, double x,
                           const SaddlePoint& sp, std::size_t dimension,
                           double window = 10.0);
UnfoldedSample unfold_bulk(std::span<const double> eigs, double x,
                           const EmpiricalSpectrum& s, AspectRatio a,
                           double window = 10.0);

/// Integrated-density unfolding around a bulk point.
///
/// Uses ξ̂(λ) = lp·∫ₓ^λ R₁ instead of the linearised form, which removes the
/// drift of the mean density across the window.  The cumulative density is
/// tabulated once, so one unfolder serves a whole ensemble.
class BulkUnfolder
{
public:
    BulkUnfolder(const SaddlePoint& sp, double x, std::size_t dimension,
                 double window = 10.0);

    double x() const noexcept { return x_; }
    double local_density() const noexcept { return r1_; }

    /// Unfold one sorted sample; only values within ±window are kept.
    UnfoldedSample unfold(std::span<const double> eigs) const;

    /// Nearest-neighbour spacings of every sample of the ensemble.
    std::vector<double> spacings(const EigenvalueEnsemble& e) const;

private:
    double unfold_one(double lambda) const;

    double x_;
    double r1_;
    double dimension_;
    double window_;
    double lo_;
    double hi_;
    std::vector<double> grid_;
    std::vector<double> cumulative_;
};

/// A bulk reference point: the median of the largest-mass support
/// component.
double bulk_center(const SaddlePoint& sp);

/// Consecutive differences of unfolded values.
std::vector<double> nearest_neighbor_spacings(const UnfoldedSample& u);

/// Wigner surmise P(s) = (π/2) s exp(-πs²/4), s ≥ 0.
double wigner_surmise(double s);
/// Its CDF 1 - exp(-πs²/4).
double wigner_surmise_cdf(double s);

/// Third-derivative bracket (γ²/p)ΣΛᵢ³/(1+Λᵢq*)³ - 1/q*³ of the soft-edge
/// expansion, computed with the degeneracy-invariant weights.
double edge_bracket(const EmpiricalSpectrum& s, AspectRatio a, double q_star);

/// Soft-edge unfolding scale bracket^{-1/3}/γ^{4/3}, so that
/// ξ̂ = scale·ξ with ξ = (λ - x_edge)(lp)^{2/3}.  Throws ValueError with
/// "invalid edge expansion" when the bracket is not positive.
double edge_scale(const EmpiricalSpectrum& s, AspectRatio a, double x_edge,
                  double q_star);

/// Soft-edge unfolding of extreme-eigenvalue samples with the analytic
/// scale: ξ̂ = scale·(λ - x_edge)(lp)^{2/3}.
UnfoldedSample unfold_edge(std::span<const double> samples, double x_edge,
                           double scale, std::size_t dimension);

/// Closed-form approximation of the Tracy-Widom (β = 1) density,
/// c·(t + 8.93)^{78.66} exp(-8.93 t) for t > -8.93, zero otherwise.  The
/// constant c ≈ 6.40e-76 is the exact normalisation of this shifted gamma
/// density (the commonly quoted 6.68e-76 integrates to 1.044).
double tw_approx(double t);

/// CDF of the same approximation.  The density is a shifted gamma density
/// (shape 79.66, rate 8.93); the CDF is the normalised incomplete gamma
/// function.
double tw_approx_cdf(double t);

/// Unit-normalised histogram of spacings on [0, s_max].  Throws ValueError
/// when fewer than 100 spacings are supplied.
HistogramDensity spacing_histogram(std::span<const double> spacings,
                                   std::size_t bins, double s_max = 4.0);

/// Options of the internal GOE reference simulation.
struct GoeSpacingOptions
{
    std::size_t size = 200;
    std::size_t draws = 10000;
    std::uint64_t seed = 0;
};

/// Unfolded nearest-neighbour spacings from the central quarter of GOE
/// matrices (tridiagonal β = 1 model, semicircle unfolding).
std::vector<double> goe_spacings(const GoeSpacingOptions& options);

/// Spacings of an uncorrelated (Poisson) spectrum: unit exponentials.
std::vector<double> poisson_spacings(std::size_t count, std::uint64_t seed);

/// Divide every spacing by the sample mean spacing.
std::vector<double> normalize_mean(std::span<const double> spacings);

}  // namespace cwishart
