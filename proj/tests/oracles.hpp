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


// Independent reference implementations shared by the unit tests and the
// acceptance runner.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "cwishart/random.hpp"

namespace cwishart::testing {

inline Eigen::MatrixXd random_antisymmetric(std::size_t dim, Engine& rng)
{
    std::normal_distribution<double> normal;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                              static_cast<Eigen::Index>(dim));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
            a(i, j) = normal(rng);
            a(j, i) = -a(i, j);
        }
    }
    return a;
}

/// (-1)^l 2^{2n-2l} π/(2n-2l-1)!, the prefactor between the skew transforms
/// and their integral representation.
inline double transform_prefactor(std::size_t l, std::size_t n)
{
    const double sign = (l % 2 == 0) ? 1.0 : -1.0;
    return sign * std::pow(2.0, 2.0 * (n - l)) * std::numbers::pi /
           std::tgamma(2.0 * (n - l));
}

/// Symmetric two-eigenvalue Heine-type integral
/// ∫∫_{[0,1]²} |λ₁-λ₂| (λ₁λ₂)^{l-1/2} ((1-λ₁)(1-λ₂))^{n-l-1} e^{-x(λ₁+λ₂)},
/// evaluated by nested tanh-sinh quadrature in double precision.  The
/// substitution λ = u² removes the endpoint singularity at l = 0.
inline double heine_oracle(std::size_t l, std::size_t n, double x)
{
    boost::math::quadrature::tanh_sinh<double> outer;
    const double m = static_cast<double>(n - l - 1);
    const double a = 2.0 * static_cast<double>(l);
    // Integrate over u₂ < u₁ and double; dλ = 2u du for each variable.
    const auto inner = [&](double u1) {
        boost::math::quadrature::tanh_sinh<double> ts;
        const double l1 = u1 * u1;
        const auto f = [&](double u2) {
            const double l2 = u2 * u2;
            return 4.0 * (l1 - l2) * std::pow(u1 * u2, a) *
                   std::pow((1 - l1) * (1 - l2), m) * std::exp(-x * (l1 + l2));
        };
        return u1 > 0.0 ? ts.integrate(f, 0.0, u1, 1e-14) : 0.0;
    };
    return 2.0 * outer.integrate(inner, 0.0, 1.0, 1e-13);
}

/// w_x(E) = e^{iE+1}/((iE+1)^{n+1/2}(iE+x+1)).
inline std::complex<double> weight(double e, double x, std::size_t n)
{
    const std::complex<double> z(1.0, e);
    return std::exp(z) / (std::pow(z, static_cast<double>(n) + 0.5) * (z + x));
}

/// Brute-force (1/i)∫∫ sign(E₁-E₂) w_{x₁}(E₁) w_{x₂}(E₂) over [-R, R]²:
/// the inner integral is accumulated as a running trapezoid sum so the
/// sign function costs nothing.
inline double direct_kernel(double x1, double x2, std::size_t n, double r, double h)
{
    const auto steps = static_cast<std::size_t>(std::llround(2.0 * r / h));
    std::complex<double> total2 = 0.0;
    std::vector<std::complex<double>> w2(steps + 1);
    std::vector<std::complex<double>> w1(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        const double e = -r + h * static_cast<double>(k);
        w1[k] = weight(e, x1, n);
        w2[k] = weight(e, x2, n);
    }
    for (std::size_t k = 0; k < steps; ++k) {
        total2 += 0.5 * h * (w2[k] + w2[k + 1]);
    }
    // ∫ dE₁ w1(E₁) [∫_{E₂<E₁} w2 - ∫_{E₂>E₁} w2] = ∫ w1 (2 C(E₁) - T).
    std::complex<double> cumulative = 0.0;
    std::complex<double> sum = 0.0;
    std::complex<double> previous = w1[0] * (2.0 * cumulative - total2);
    for (std::size_t k = 0; k < steps; ++k) {
        cumulative += 0.5 * h * (w2[k] + w2[k + 1]);
        const std::complex<double> current = w1[k + 1] * (2.0 * cumulative - total2);
        sum += 0.5 * h * (previous + current);
        previous = current;
    }
    return (sum / std::complex<double>(0.0, 1.0)).real();
}

/// Closed-form Marchenko-Pastur density for Λ ≡ 1.
inline double marchenko_pastur(double x, double gamma_sq)
{
    const double g = std::sqrt(gamma_sq);
    const double lo = (1 - g) * (1 - g);
    const double hi = (1 + g) * (1 + g);
    if (x <= lo || x >= hi) {
        return 0.0;
    }
    return std::sqrt((hi - x) * (x - lo)) / (2.0 * std::numbers::pi * gamma_sq * x);
}

}  // namespace cwishart::testing
