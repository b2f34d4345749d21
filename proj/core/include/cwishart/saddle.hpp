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

#include <complex>
#include <cstddef>
#include <vector>

#include "cwishart/spectrum.hpp"

namespace cwishart {

/// Value and first two derivatives of the scalar saddle-point function
/// g(q) = -1/q + (γ²/p) Σᵢ multᵢ Λᵢ/(1 + Λᵢ q).
template <class T>
struct GDerivatives
{
    T g;
    T dg;
    T d2g;
};

/// Root q₀(x) of -x + g(q) = 0 on the physical branch.
struct SaddleSolution
{
    double x = 0.0;
    std::complex<double> q0;
    double residual = 0.0;  ///< |g(q₀) - x|
    bool in_support = false;
};

enum class EdgeKind { lower, upper };

/// One end of a support interval.
struct Edge
{
    double x = 0.0;           ///< edge position
    double q_star = 0.0;      ///< critical point of g, g'(q*) = 0 (0 for hard edges)
    EdgeKind kind = EdgeKind::upper;
    bool hard = false;        ///< hard edge at the origin (γ² = 1)
    double coefficient = 0.0; ///< c in R₁ ≈ c·√|x - x_edge|; NaN when undefined
};

/// One connected component of the macroscopic support.
struct SupportInterval
{
    Edge lower;
    Edge upper;
    /// Indices (into EmpiricalSpectrum::values()) of the eigenvalues Λᵢ
    /// whose poles -1/Λᵢ lie inside the component's critical-point range.
    std::vector<std::size_t> poles;
    /// Fraction of the level density carried by this component
    /// (Σ multᵢ/p over `poles`).
    double mass = 0.0;

    double width() const noexcept { return upper.x - lower.x; }
    bool contains(double x) const noexcept
    {
        return x >= lower.x && x <= upper.x;
    }
};

/// Disjoint, sorted support intervals of the macroscopic level density.
struct SpectralSupport
{
    std::vector<SupportInterval> intervals;
    bool hard_edge_at_origin = false;

    bool contains(double x) const noexcept;
    double lower() const;
    double upper() const;
};

/// Saddle-point problem for a fixed spectrum and aspect ratio.
///
/// Precomputes the distinct eigenvalues and normalised weights so that
/// repeated evaluations on a grid are cheap.  Instances are immutable and
/// may be shared between threads.
class SaddlePoint
{
public:
    SaddlePoint(const EmpiricalSpectrum& s, AspectRatio a);

    double gamma_sq() const noexcept { return gamma_sq_; }
    const std::vector<double>& lambdas() const noexcept { return lambda_; }
    const std::vector<double>& weights() const noexcept { return weight_; }

    /// g, g', g'' at a complex point.  Throws NumericError within 1e-14
    /// (relative) of a pole.
    GDerivatives<std::complex<double>> g_funcs(std::complex<double> q) const;
    /// Real-axis overload used by the edge search (no pole check).
    GDerivatives<double> g_funcs(double q) const;

    /// Physical root of -x + g(q) = 0.  Inside the support the root with
    /// Im q > 0 is returned, outside the real root on an increasing branch
    /// of g.  Throws ValueError for x ≤ 0 and NumericError when no root with
    /// residual below 1e-10 is found.
    SaddleSolution solve(double x) const;

    /// Macroscopic level density R₁(x) = Im q₀(x)/(γ²π), zero outside the
    /// support.
    double density(double x) const;

    /// Support intervals and edges from the critical points of g.
    SpectralSupport support() const;

    /// c = √(2/|g''(q*)|)/(γ²π).  Throws NumericError when |g''| < 1e-10.
    double edge_coefficient(double q_star) const;

    /// ∫_a^b R₁(x) dx with an edge-aware cosine substitution.
    double integrate_density(double a, double b) const;

    /// Scale-aware threshold on Im q₀ separating support from gaps.
    double support_threshold() const noexcept { return threshold_; }

private:
    bool acceptable(const std::complex<double>& q, double x,
                    double& residual) const;
    std::complex<double> newton(std::complex<double> q, double x) const;
    std::complex<double> polynomial_root(double x) const;

    std::vector<double> lambda_;
    std::vector<double> weight_;
    double gamma_sq_;
    double mean_lambda_;
    double threshold_;
};

/// Free-function forms of the SaddlePoint members.
GDerivatives<std::complex<double>> g_funcs(std::complex<double> q,
                                           const EmpiricalSpectrum& s,
                                           AspectRatio a);
SaddleSolution solve_saddle(double x, const EmpiricalSpectrum& s,
                            AspectRatio a);
double density(double x, const EmpiricalSpectrum& s, AspectRatio a);
SpectralSupport support(const EmpiricalSpectrum& s, AspectRatio a);
double edge_coefficient(double x_edge, double q_star,
                        const EmpiricalSpectrum& s, AspectRatio a);

/// Density on a uniform grid of `points` values in [x_min, x_max]
/// (x ≤ 0 yields zero).
std::vector<double> density_grid(const SaddlePoint& sp, double x_min,
                                 double x_max, std::size_t points);

}  // namespace cwishart
