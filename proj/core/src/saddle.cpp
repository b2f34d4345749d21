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

#include "cwishart/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cwishart/error.hpp"

namespace cwishart {

namespace {

using cplx = std::complex<double>;

constexpr double pole_guard = 1e-14;
constexpr double residual_tolerance = 1e-10;

/// Multiply two polynomials given by ascending coefficients.
std::vector<double> poly_mul(const std::vector<double>& a,
                             const std::vector<double>& b)
{
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

/// Bisection for a sign change of f on (lo, hi), endpoints excluded.
template <class F>
double bisect(F&& f, double lo, double hi)
{
    const double f_lo_sign = std::copysign(1.0, f(lo));
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (std::copysign(1.0, f(mid)) == f_lo_sign) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

bool SpectralSupport::contains(double x) const noexcept
{
    return std::any_of(intervals.begin(), intervals.end(),
                       [x](const SupportInterval& iv) { return iv.contains(x); });
}

double SpectralSupport::lower() const
{
    if (intervals.empty()) {
        throw ValueError("empty support");
    }
    return intervals.front().lower.x;
}

double SpectralSupport::upper() const
{
    if (intervals.empty()) {
        throw ValueError("empty support");
    }
    return intervals.back().upper.x;
}

SaddlePoint::SaddlePoint(const EmpiricalSpectrum& s, AspectRatio a)
    : lambda_(s.values()),
      weight_(s.weights()),
      gamma_sq_(a.gamma_sq()),
      mean_lambda_(s.mean()),
      threshold_(1e-8 / s.mean())
{
    if (lambda_.empty()) {
        throw ValueError("saddle point needs a nonempty spectrum");
    }
}

GDerivatives<cplx> SaddlePoint::g_funcs(cplx q) const
{
    if (std::abs(q) < pole_guard / mean_lambda_) {
        throw NumericError("evaluation at pole q = 0");
    }
    cplx s1 = 0.0;
    cplx s2 = 0.0;
    cplx s3 = 0.0;
    for (std::size_t i = 0; i < lambda_.size(); ++i) {
        const cplx d = 1.0 + lambda_[i] * q;
        if (std::abs(d) < pole_guard) {
            throw NumericError("evaluation at pole q = -1/Lambda");
        }
        const cplx r = lambda_[i] / d;
        const cplx r2 = r * r;
        s1 += weight_[i] * r;
        s2 += weight_[i] * r2;
        s3 += weight_[i] * r2 * r;
    }
    const cplx inv = 1.0 / q;
    return {-inv + gamma_sq_ * s1, inv * inv - gamma_sq_ * s2,
            -2.0 * inv * inv * inv + 2.0 * gamma_sq_ * s3};
}

GDerivatives<double> SaddlePoint::g_funcs(double q) const
{
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
    for (std::size_t i = 0; i < lambda_.size(); ++i) {
        const double r = lambda_[i] / (1.0 + lambda_[i] * q);
        const double r2 = r * r;
        s1 += weight_[i] * r;
        s2 += weight_[i] * r2;
        s3 += weight_[i] * r2 * r;
    }
    const double inv = 1.0 / q;
    return {-inv + gamma_sq_ * s1, inv * inv - gamma_sq_ * s2,
            -2.0 * inv * inv * inv + 2.0 * gamma_sq_ * s3};
}

cplx SaddlePoint::newton(cplx q, double x) const
{
    for (int it = 0; it < 100; ++it) {
        const auto d = g_funcs(q);
        if (d.dg == 0.0) {
            break;
        }
        const cplx step = (d.g - x) / d.dg;
        q -= step;
        if (std::abs(step) <= 1e-15 * std::abs(q)) {
            break;
        }
    }
    return q;
}

bool SaddlePoint::acceptable(const cplx& q, double x, double& residual) const
{
    if (!std::isfinite(q.real()) || !std::isfinite(q.imag())) {
        return false;
    }
    try {
        const auto d = g_funcs(q);
        residual = std::abs(d.g - x);
        if (residual >= residual_tolerance) {
            return false;
        }
        if (q.imag() > threshold_) {
            return true;
        }
        if (std::abs(q.imag()) > threshold_) {
            return false;
        }
        // Real root: only the branch with positive slope contributes.
        return g_funcs(q.real()).dg > 0.0;
    } catch (const NumericError&) {
        return false;
    }
}

cplx SaddlePoint::polynomial_root(double x) const
{
    // Clear denominators of g(q) - x over q·∏(1 + Λᵢq).
    const std::size_t m = lambda_.size();
    std::vector<double> prod{1.0};
    for (double l : lambda_) {
        prod = poly_mul(prod, {1.0, l});
    }
    std::vector<double> poly(m + 2, 0.0);
    for (std::size_t k = 0; k < prod.size(); ++k) {
        poly[k] -= prod[k];
        poly[k + 1] -= x * prod[k];
    }
    for (std::size_t i = 0; i < m; ++i) {
        std::vector<double> others{1.0};
        for (std::size_t j = 0; j < m; ++j) {
            if (j != i) {
                others = poly_mul(others, {1.0, lambda_[j]});
            }
        }
        const double c = gamma_sq_ * weight_[i] * lambda_[i];
        for (std::size_t k = 0; k < others.size(); ++k) {
            poly[k + 1] += c * others[k];
        }
    }
    while (poly.size() > 1 && poly.back() == 0.0) {
        poly.pop_back();
    }
    const auto degree = static_cast<Eigen::Index>(poly.size() - 1);
    if (degree < 1) {
        throw NumericError("degenerate saddle-point polynomial");
    }
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
    for (Eigen::Index k = 0; k < degree; ++k) {
        companion(0, k) = -poly[static_cast<std::size_t>(degree - 1 - k)] /
                          poly.back();
        if (k + 1 < degree) {
            companion(k + 1, k) = 1.0;
        }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) {
        throw NumericError("companion-matrix eigenvalues failed");
    }

    cplx best;
    double best_residual = std::numeric_limits<double>::infinity();
    bool found = false;
    for (Eigen::Index k = 0; k < degree; ++k) {
        cplx q = solver.eigenvalues()(k);
        if (q.imag() < 0.0) {
            q = std::conj(q);
        }
        if (std::abs(q.imag()) <= threshold_) {
            q = cplx(q.real(), 0.0);
        }
        try {
            q = newton(q, x);
        } catch (const NumericError&) {
            continue;
        }
        if (std::abs(q.imag()) <= threshold_) {
            q = cplx(q.real(), 0.0);
        }
        double residual = 0.0;
        if (!acceptable(q, x, residual)) {
            continue;
        }
        const bool better = !found || q.imag() > best.imag() + threshold_ ||
                            (std::abs(q.imag() - best.imag()) <= threshold_ &&
                             residual < best_residual);
        if (better) {
            best = q;
            best_residual = residual;
            found = true;
        }
    }
    if (!found) {
        throw NumericError("saddle point solver did not converge at x = " +
                           std::to_string(x));
    }
    return best;
}

SaddleSolution SaddlePoint::solve(double x) const
{
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw ValueError("saddle point requires x > 0");
    }
    // Damped fixed point q <- 1/(S(q) - x), S(q) = (γ²/p)ΣΛ/(1 + Λq).
    cplx q(0.0, 1.0 / mean_lambda_);
    for (int it = 0; it < 400; ++it) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < lambda_.size(); ++i) {
            s += weight_[i] * lambda_[i] / (1.0 + lambda_[i] * q);
        }
        const cplx next = 0.5 * q + 0.5 / (gamma_sq_ * s - x);
        const double change = std::abs(next - q);
        q = next;
        if (change <= 1e-13 * std::abs(q)) {
            break;
        }
    }
    double residual = 0.0;
    bool ok = false;
    try {
        q = newton(q, x);
        if (std::abs(q.imag()) <= threshold_) {
            q = newton(cplx(q.real(), 0.0), x);
        }
        ok = acceptable(q, x, residual);
    } catch (const NumericError&) {
        ok = false;
    }
    if (!ok) {
        q = polynomial_root(x);
        acceptable(q, x, residual);
    }
    SaddleSolution sol;
    sol.x = x;
    sol.q0 = q.imag() > threshold_ ? q : cplx(q.real(), 0.0);
    sol.residual = residual;
    sol.in_support = q.imag() > threshold_;
    return sol;
}

double SaddlePoint::density(double x) const
{
    if (!(x > 0.0)) {
        return 0.0;
    }
    const auto sol = solve(x);
    if (!sol.in_support) {
        return 0.0;
    }
    return sol.q0.imag() / (gamma_sq_ * std::numbers::pi);
}

double SaddlePoint::edge_coefficient(double q_star) const
{
    const double d2 = g_funcs(q_star).d2g;
    if (std::abs(d2) < 1e-10) {
        throw NumericError(
            "multicritical edge (Pearcey regime), unsupported");
    }
    return std::sqrt(2.0 / std::abs(d2)) / (gamma_sq_ * std::numbers::pi);
}

SpectralSupport SaddlePoint::support() const
{
    const std::size_t m = lambda_.size();
    std::vector<double> poles(m);
    for (std::size_t i = 0; i < m; ++i) {
        poles[i] = -1.0 / lambda_[i];
    }
    auto dg = [this](double q) { return g_funcs(q).dg; };

    struct Critical
    {
        double q;
        EdgeKind kind;
        bool hard;
    };
    std::vector<Critical> crit;

    // Lower end of the spectrum: zero of g' left of the first pole.
    {
        bool found = false;
        if (gamma_sq_ < 1.0) {
            double lo = 2.0 * poles.front();
            for (int it = 0; it < 2000 && std::isfinite(lo); ++it) {
                if (dg(lo) > 0.0) {
                    found = true;
                    break;
                }
                lo *= 2.0;
            }
            if (found) {
                crit.push_back({bisect(dg, lo, poles.front()),
                                EdgeKind::lower, false});
            }
        }
        if (!found) {
            crit.push_back({-std::numeric_limits<double>::infinity(),
                            EdgeKind::lower, true});
        }
    }

    // Gaps between consecutive poles: zero or two zeros of g'.
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double a = poles[i];
        const double b = poles[i + 1];
        constexpr int probes = 256;
        std::vector<double> qs(probes - 1);
        std::vector<double> vs(probes - 1);
        for (int k = 1; k < probes; ++k) {
            const double t = (1.0 - std::cos(std::numbers::pi * k / probes)) / 2.0;
            qs[k - 1] = a + (b - a) * t;
            vs[k - 1] = dg(qs[k - 1]);
        }
        std::vector<double> zeros;
        for (std::size_t k = 0; k + 1 < qs.size(); ++k) {
            if ((vs[k] > 0.0) != (vs[k + 1] > 0.0)) {
                zeros.push_back(bisect(dg, qs[k], qs[k + 1]));
            }
        }
        if (zeros.empty()) {
            // Two nearby zeros may hide between probes: refine the maximum.
            const auto k_best = static_cast<std::size_t>(
                std::max_element(vs.begin(), vs.end()) - vs.begin());
            double lo = k_best > 0 ? qs[k_best - 1] : a + 1e-3 * (qs[0] - a);
            double hi = k_best + 1 < qs.size() ? qs[k_best + 1]
                                               : b - 1e-3 * (b - qs.back());
            const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
            double c = hi - phi * (hi - lo);
            double d = lo + phi * (hi - lo);
            for (int it = 0; it < 200 && hi - lo > 1e-16 * std::abs(hi); ++it) {
                if (dg(c) > dg(d)) {
                    hi = d;
                } else {
                    lo = c;
                }
                c = hi - phi * (hi - lo);
                d = lo + phi * (hi - lo);
            }
            const double q_max = 0.5 * (lo + hi);
            if (dg(q_max) > 0.0) {
                const double left =
                    k_best > 0 ? qs[k_best - 1] : a + 1e-3 * (qs[0] - a);
                const double right = k_best + 1 < qs.size()
                                         ? qs[k_best + 1]
                                         : b - 1e-3 * (b - qs.back());
                zeros.push_back(bisect(dg, left, q_max));
                zeros.push_back(bisect(dg, q_max, right));
            }
        }
        for (std::size_t k = 0; k + 1 < zeros.size(); k += 2) {
            crit.push_back({zeros[k], EdgeKind::upper, false});
            crit.push_back({zeros[k + 1], EdgeKind::lower, false});
        }
    }

    // Upper end of the spectrum: zero of g' between the last pole and 0.
    crit.push_back({bisect(dg, poles.back(), 0.0), EdgeKind::upper, false});

    auto make_edge = [this](const Critical& c) {
        Edge e;
        e.kind = c.kind;
        e.hard = c.hard;
        if (c.hard) {
            e.x = 0.0;
            e.q_star = 0.0;
            e.coefficient = std::numeric_limits<double>::quiet_NaN();
            return e;
        }
        e.q_star = c.q;
        e.x = g_funcs(c.q).g;
        try {
            e.coefficient = edge_coefficient(c.q);
        } catch (const NumericError&) {
            e.coefficient = std::numeric_limits<double>::quiet_NaN();
        }
        return e;
    };

    SpectralSupport out;
    out.hard_edge_at_origin = crit.front().hard;
    for (std::size_t k = 0; k + 1 < crit.size(); k += 2) {
        SupportInterval iv;
        iv.lower = make_edge(crit[k]);
        iv.upper = make_edge(crit[k + 1]);
        for (std::size_t i = 0; i < m; ++i) {
            if (poles[i] > crit[k].q && poles[i] < crit[k + 1].q) {
                iv.poles.push_back(i);
                iv.mass += weight_[i];
            }
        }
        out.intervals.push_back(std::move(iv));
    }
    return out;
}

double SaddlePoint::integrate_density(double a, double b) const
{
    if (!(b > a)) {
        return 0.0;
    }
    auto f = [&](double theta) {
        const double x = a + (b - a) * (1.0 - std::cos(theta)) / 2.0;
        return density(x) * (b - a) * std::sin(theta) / 2.0;
    };
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, 0.0, std::numbers::pi, 15, 1e-12, &error);
}

GDerivatives<cplx> g_funcs(cplx q, const EmpiricalSpectrum& s, AspectRatio a)
{
    return SaddlePoint(s, a).g_funcs(q);
}

SaddleSolution solve_saddle(double x, const EmpiricalSpectrum& s,
                            AspectRatio a)
{
    return SaddlePoint(s, a).solve(x);
}

double density(double x, const EmpiricalSpectrum& s, AspectRatio a)
{
    return SaddlePoint(s, a).density(x);
}

SpectralSupport support(const EmpiricalSpectrum& s, AspectRatio a)
{
    return SaddlePoint(s, a).support();
}

double edge_coefficient(double /*x_edge*/, double q_star,
                        const EmpiricalSpectrum& s, AspectRatio a)
{
    return SaddlePoint(s, a).edge_coefficient(q_star);
}

std::vector<double> density_grid(const SaddlePoint& sp, double x_min,
                                 double x_max, std::size_t points)
{
    std::vector<double> out(points, 0.0);
    for (std::size_t k = 0; k < points; ++k) {
        const double x =
            points == 1 ? x_min
                        : x_min + (x_max - x_min) * static_cast<double>(k) /
                                      static_cast<double>(points - 1);
        out[k] = sp.density(x);
    }
    return out;
}

}  // namespace cwishart
