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

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cwishart/error.hpp"

namespace cwishart::detail {

/// Parlett-Reid reduction of a dense row-major antisymmetric matrix.
/// Calls visit(pivot_value) for each 2×2 block and returns the accumulated
/// permutation sign, or 0 when the matrix is singular.
template <class T, class Visit>
int parlett_reid(std::vector<T> a, std::size_t n, Visit&& visit)
{
    using std::abs;
    int sign = 1;
    auto at = [&](std::size_t i, std::size_t j) -> T& { return a[i * n + j]; };
    for (std::size_t k = 0; k + 1 < n; k += 2) {
        std::size_t pivot = k + 1;
        for (std::size_t i = k + 2; i < n; ++i) {
            if (abs(at(i, k)) > abs(at(pivot, k))) {
                pivot = i;
            }
        }
        if (pivot != k + 1) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(at(k + 1, j), at(pivot, j));
            }
            for (std::size_t i = 0; i < n; ++i) {
                std::swap(at(i, k + 1), at(i, pivot));
            }
            sign = -sign;
        }
        if (at(k + 1, k) == T(0)) {
            return 0;
        }
        const T head = at(k, k + 1);
        visit(head);
        if (k + 2 < n) {
            std::vector<T> tau(n - k - 2);
            std::vector<T> col(n - k - 2);
            for (std::size_t i = k + 2; i < n; ++i) {
                tau[i - k - 2] = at(k, i) / head;
                col[i - k - 2] = at(i, k + 1);
            }
            for (std::size_t i = k + 2; i < n; ++i) {
                for (std::size_t j = k + 2; j < n; ++j) {
                    at(i, j) += tau[i - k - 2] * col[j - k - 2] -
                                col[i - k - 2] * tau[j - k - 2];
                }
            }
        }
    }
    return sign;
}

/// Pfaffian of a dense row-major antisymmetric matrix of even size.
template <class T>
T pfaffian_dense(const std::vector<T>& a, std::size_t n)
{
    if (n % 2 != 0) {
        return T(0);
    }
    T product = 1;
    const int sign = parlett_reid(a, n, [&](const T& v) { product *= v; });
    return sign == 0 ? T(0) : T(sign) * product;
}

/// (log|Pf|, sign) of a dense antisymmetric double matrix; sign 0 for a
/// singular matrix (log_abs is then -inf).
inline std::pair<double, int> log_pfaffian_dense(const std::vector<double>& a,
                                                 std::size_t n)
{
    if (n % 2 != 0) {
        return {-HUGE_VAL, 0};
    }
    double log_abs = 0.0;
    int value_sign = 1;
    const int sign = parlett_reid(a, n, [&](double v) {
        log_abs += std::log(std::abs(v));
        if (v < 0.0) {
            value_sign = -value_sign;
        }
    });
    if (sign == 0) {
        return {-HUGE_VAL, 0};
    }
    return {log_abs, sign * value_sign};
}

/// Throws ValueError unless `a` is square, even dimensional and
/// antisymmetric to 1e-10 relative.
inline void check_antisymmetric(const Eigen::MatrixXd& a)
{
    if (a.rows() != a.cols()) {
        throw ValueError("pfaffian requires a square matrix");
    }
    if (a.rows() % 2 != 0) {
        throw ValueError("pfaffian requires an even dimension");
    }
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a + a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
        throw ValueError("pfaffian requires an antisymmetric matrix");
    }
}

}  // namespace cwishart::detail
