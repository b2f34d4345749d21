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

#include <Eigen/Dense>

#include "cwishart/spectrum.hpp"

namespace cwishart {

/// A real number stored as sign·exp(log_abs), used for constants that
/// overflow double precision.
struct SignedLog
{
    double log_abs = 0.0;
    int sign = 1;

    double value() const;
};

/// Skew norm h_j = <q_{2j}, q_{2j+1}> of the monic skew-orthogonal
/// polynomials of the doubly degenerate weight with parameter n:
/// h_j = -2^{2n-4j+1} π (2j)!/(2n-2j-1)!.  Requires 0 ≤ j ≤ n-1.
SignedLog h_norm(std::size_t j, std::size_t n);

/// Closed form of ∏_{l<j} h_l, the inverse normalisation of the
/// j-dimensional skew-orthogonal system.  Requires 0 ≤ j ≤ n.
SignedLog inv_ktilde(std::size_t j, std::size_t n);

enum class Parity { even, odd };

/// Real parts of the Cauchy-type transforms of the skew-orthogonal
/// polynomials: q̂_{2l}(x) = i·even and q̂_{2l+1}(x) = odd.
struct QHatPair
{
    double even = 0.0;
    double odd = 0.0;
};

/// Transforms of q_{2l} and q_{2l+1} at x > 0 for 0 ≤ l ≤ n-1.
QHatPair q_hat_pair(std::size_t l, std::size_t n, double x);

/// q̂ of the given parity as a complex number (purely imaginary for even,
/// real for odd).
std::complex<double> q_hat(Parity parity, std::size_t l, std::size_t n,
                           double x);

/// The antisymmetric double-integral part of the kernel, made real:
/// (1/i)·∫∫ sign(E₁-E₂) w_{x₁}(E₁) w_{x₂}(E₂) dE₁dE₂ with
/// w_x(E) = e^{iE+1}/((iE+1)^{n+1/2}(iE+x+1)).
double kernel_g2(double x1, double x2, std::size_t n);

/// p×p real antisymmetric kernel matrix at t for distinct Λ (p even,
/// p ≤ 2n), evaluated at x_a = n·t/(2Λ_a).
Eigen::MatrixXd build_kernel(double t, const std::vector<double>& lambdas,
                             std::size_t n);

/// Pfaffian of an even-dimensional antisymmetric matrix by Parlett-Reid
/// tridiagonalisation with pivoting.  Throws ValueError for odd dimension
/// or a non-antisymmetric input (1e-10 relative).
double pfaffian(const Eigen::MatrixXd& a);
SignedLog log_pfaffian(const Eigen::MatrixXd& a);

/// Options of the multiprecision gap-probability evaluation.
struct GapCdfOptions
{
    /// Extra decimal digits on top of the automatic precision estimate.
    unsigned extra_digits = 0;
    /// Recompute with 20 more digits and twice the quadrature nodes and
    /// throw NumericError if the two results differ by more than 1e-9.
    bool verify = false;
};

/// Probability that no eigenvalue of the doubly degenerate 2p×2n ensemble
/// exceeds t.
///
/// The ensemble is W Wᵀ with W of size 2p×2n whose entries have variance
/// Λ/n, i.e. E[W Wᵀ] = 2·C ⊗ 1₂.  Equivalently E(t) = P(λ_max ≤ t/2) for
/// the ensemble correlated with C ⊗ 1₂ and normalised by 1/(2n) (the one
/// produced by run_ensemble with l = 2).  Λ must be distinct (relative gap
/// ≥ 1e-6), p even and p ≤ 2n.
double gap_cdf(double t, const std::vector<double>& lambdas, std::size_t n,
               const GapCdfOptions& options = {});

/// Spectrum overload: every value must have multiplicity one.
double gap_cdf(double t, const EmpiricalSpectrum& s, std::size_t n,
               const GapCdfOptions& options = {});

/// CDF of the largest eigenvalue of the C ⊗ 1₂ ensemble at its natural
/// scale: P(λ_max ≤ x) = gap_cdf(2x).
double largest_eigenvalue_cdf(double x, const std::vector<double>& lambdas,
                              std::size_t n, const GapCdfOptions& options = {});

struct GapCdfTable
{
    std::vector<double> t;
    std::vector<double> e;
    std::vector<double> lambdas;
    std::size_t n = 0;
};

GapCdfTable gap_cdf_table(const std::vector<double>& ts,
                          const std::vector<double>& lambdas, std::size_t n,
                          const GapCdfOptions& options = {});

/// Decimal digits the evaluation at t uses (exposed for diagnostics).
unsigned gap_cdf_precision(double t, const std::vector<double>& lambdas,
                           std::size_t n);

}  // namespace cwishart
