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

#include "cwishart/gapcdf.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>

#include <boost/multiprecision/mpfr.hpp>

#include "cwishart/error.hpp"
#include "pfaffian_impl.hpp"

namespace cwishart {

namespace {

using mp = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<0>,
    boost::multiprecision::et_off>;

/// The default precision of dynamic MPFR numbers is process global in the
/// Boost versions we support, so every multiprecision evaluation holds this
/// lock for its whole duration.
std::mutex& mp_mutex()
{
    static std::mutex m;
    return m;
}

/// Sets the working precision for the lifetime of the object.
class PrecisionScope
{
public:
    explicit PrecisionScope(unsigned digits) : saved_(mp::default_precision())
    {
        mp::default_precision(digits);
    }
    ~PrecisionScope() { mp::default_precision(saved_); }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned saved_;
};

/// Gauss-Legendre rule on [0, 1].
struct Rule
{
    std::vector<mp> nodes;
    std::vector<mp> weights;
};

/// Cached rule with `count` nodes at `digits` decimal digits.  Caller holds
/// mp_mutex() and has set the working precision to `digits`.
const Rule& gauss_legendre(unsigned count, unsigned digits)
{
    static std::map<std::pair<unsigned, unsigned>, std::unique_ptr<Rule>> cache;
    auto& slot = cache[{count, digits}];
    if (slot) {
        return *slot;
    }
    auto rule = std::make_unique<Rule>();
    rule->nodes.resize(count);
    rule->weights.resize(count);
    const mp tolerance = pow(mp(10), -static_cast<int>(digits) + 2);
    const unsigned half = (count + 1) / 2;
    for (unsigned i = 0; i < half; ++i) {
        mp z = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
        mp derivative;
        for (int it = 0; it < 100; ++it) {
            mp p0 = 1;
            mp p1 = z;
            for (unsigned k = 2; k <= count; ++k) {
                mp p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                p0 = std::move(p1);
                p1 = std::move(p2);
            }
            derivative = count * (z * p1 - p0) / (z * z - 1);
            const mp step = p1 / derivative;
            z -= step;
            if (abs(step) < tolerance) {
                break;
            }
        }
        // Recompute the derivative at the converged root for the weight.
        mp p0 = 1;
        mp p1 = z;
        for (unsigned k = 2; k <= count; ++k) {
            mp p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
            p0 = std::move(p1);
            p1 = std::move(p2);
        }
        derivative = count * (z * p1 - p0) / (z * z - 1);
        const mp w = 1 / ((1 - z * z) * derivative * derivative);
        rule->nodes[i] = (1 - z) / 2;
        rule->weights[i] = w;
        rule->nodes[count - 1 - i] = (1 + z) / 2;
        rule->weights[count - 1 - i] = w;
    }
    slot = std::move(rule);
    return *slot;
}

unsigned round_up(double value, unsigned step)
{
    const auto v = static_cast<unsigned>(std::ceil(std::max(value, 1.0)));
    return ((v + step - 1) / step) * step;
}

/// Quadrature sizes for a given precision and largest argument.
unsigned s_nodes(unsigned digits, double x_max, double factor)
{
    return round_up(factor * (0.8 * digits + 2.0 * std::sqrt(x_max) + 24.0), 8);
}

unsigned w_nodes(unsigned digits, double x_max, double factor)
{
    return round_up(factor * (1.0 * digits + 4.0 * std::sqrt(x_max) + 24.0), 8);
}

/// Multiprecision evaluator of the skew-orthogonal transforms and the
/// double-integral kernel for fixed n.
class KernelEvaluator
{
public:
    KernelEvaluator(std::size_t n, unsigned digits, double x_max, double node_factor)
        : n_(n),
          digits_(digits),
          nu_(mp(2 * n + 1) / 2),
          epsilon_(pow(mp(10), -static_cast<int>(digits))),
          s_rule_(gauss_legendre(s_nodes(digits, x_max, node_factor), digits)),
          w_rule_(gauss_legendre(w_nodes(digits, x_max, node_factor), digits))
    {
        pi_ = acos(mp(-1));
        const mp g = tgamma(nu_);
        g2_prefactor_ = -4 * pi_ / (g * g);
    }

    const mp& pi() const { return pi_; }

    /// h_l in working precision.
    mp h(std::size_t l) const
    {
        return -pow(mp(2), static_cast<int>(2 * n_) - 4 * static_cast<int>(l) + 1) *
               pi_ * factorial(2 * l) / factorial(2 * n_ - 2 * l - 1);
    }

    /// (Q_e, Q_o) for l = 0 .. count-1 at x.
    std::vector<std::pair<mp, mp>> q_pairs(const mp& x, std::size_t count) const
    {
        std::vector<mp> i2(count, mp(0));
        std::vector<mp> i21(count, mp(0));
        const unsigned top = static_cast<unsigned>(2 * n_);
        std::vector<mp> moments(top + 1);
        std::vector<mp> poly;
        for (std::size_t k = 0; k < s_rule_.nodes.size(); ++k) {
            const mp& s = s_rule_.nodes[k];
            const mp s2 = s * s;
            const mp c = x * (1 + s2);
            exp_moments(c, top, moments);
            mp s_pow = 1;  // s^{2l}
            for (std::size_t l = 0; l < count; ++l) {
                const std::size_t m = n_ - l - 1;
                product_coefficients(m, s2, poly);
                mp j0 = 0;
                mp j1 = 0;
                const std::size_t a = 2 * l + 1;
                for (std::size_t i = 0; i < poly.size(); ++i) {
                    j0 += poly[i] * moments[a + i];
                    j1 += poly[i] * moments[a + 1 + i];
                }
                const mp base = s_rule_.weights[k] * s_pow * (1 - s2);
                i2[l] += base * j0;
                i21[l] += base * (1 + s2) * j1;
                s_pow *= s2;
            }
        }
        std::vector<std::pair<mp, mp>> out(count);
        for (std::size_t l = 0; l < count; ++l) {
            const int power = static_cast<int>(2 * n_ - 2 * l);
            mp pref = pow(mp(2), power) * pi_ / factorial(2 * n_ - 2 * l - 1);
            if (l % 2 == 1) {
                pref = -pref;
            }
            const mp a = 4 * i2[l];
            const mp b = 4 * i21[l];
            out[l] = {pref * a, pref * x * (a - b)};
        }
        return out;
    }

    /// F_x on the w-quadrature nodes: (F_x(2 - w²), F_x(w²)).
    std::pair<std::vector<mp>, std::vector<mp>> f_tables(const mp& x) const
    {
        const std::size_t count = w_rule_.nodes.size();
        std::vector<mp> plus(count);
        std::vector<mp> minus(count);
        for (std::size_t k = 0; k < count; ++k) {
            const mp& w = w_rule_.nodes[k];
            const mp w2 = w * w;
            const mp vp = 2 - w2;
            plus[k] = pow(vp, static_cast<int>(n_)) * sqrt(vp) * phi(x * vp);
            minus[k] = pow(w, static_cast<int>(2 * n_ + 1)) * phi(x * w2);
        }
        return {std::move(plus), std::move(minus)};
    }

    /// Real double-integral kernel from two F tables.
    mp g2(const std::pair<std::vector<mp>, std::vector<mp>>& fa,
          const std::pair<std::vector<mp>, std::vector<mp>>& fb) const
    {
        mp sum = 0;
        for (std::size_t k = 0; k < w_rule_.nodes.size(); ++k) {
            const mp& w = w_rule_.nodes[k];
            const mp jac = 2 * w / (1 - w * w);
            sum += w_rule_.weights[k] * jac *
                   (fa.first[k] * fb.second[k] - fa.second[k] * fb.first[k]);
        }
        return g2_prefactor_ * sum;
    }

private:
    static mp factorial(std::size_t k)
    {
        mp f = 1;
        for (std::size_t i = 2; i <= k; ++i) {
            f *= static_cast<unsigned>(i);
        }
        return f;
    }

    /// L_k(c) = ∫₀¹ z^k e^{-cz} dz for k = 0..top: upward recursion where
    /// stable (k ≤ c), series plus downward recursion above.
    void exp_moments(const mp& c, unsigned top, std::vector<mp>& out) const
    {
        out.resize(top + 1);
        const mp ec = exp(-c);
        const double cd = c.convert_to<double>();
        const unsigned up = cd >= 1.0 ? static_cast<unsigned>(std::min<double>(std::floor(cd), top))
                                      : 0;
        bool have_up = cd >= 1.0;
        if (have_up) {
            out[0] = (1 - ec) / c;
            for (unsigned k = 1; k <= up; ++k) {
                out[k] = (k * out[k - 1] - ec) / c;
            }
        }
        const unsigned first_down = have_up ? up + 1 : 0;
        if (first_down > top) {
            return;
        }
        // Series for the top moment: e^{-c} Σ_j c^j/((K+1)…(K+1+j)).
        mp term = mp(1) / (top + 1);
        mp sum = term;
        for (unsigned j = 1; j < 100000; ++j) {
            term *= c / (top + 1 + j);
            sum += term;
            if (term < epsilon_ * sum) {
                break;
            }
        }
        out[top] = ec * sum;
        for (unsigned k = top; k > first_down; --k) {
            out[k - 1] = (c * out[k] + ec) / k;
        }
    }

    /// Coefficients of (1 - z)^m (1 - s² z)^m in ascending powers of z.
    static void product_coefficients(std::size_t m, const mp& s2,
                                     std::vector<mp>& out)
    {
        std::vector<mp> a(m + 1);
        std::vector<mp> b(m + 1);
        mp binom = 1;
        mp s_pow = 1;
        for (std::size_t i = 0; i <= m; ++i) {
            a[i] = (i % 2 == 0) ? binom : mp(-binom);
            b[i] = a[i] * s_pow;
            binom = binom * static_cast<unsigned>(m - i) / static_cast<unsigned>(i + 1);
            s_pow *= s2;
        }
        out.assign(2 * m + 1, mp(0));
        for (std::size_t i = 0; i <= m; ++i) {
            for (std::size_t j = 0; j <= m; ++j) {
                out[i + j] += a[i] * b[j];
            }
        }
    }

    /// φ(z) = e^{-z} Σ_j z^j/(j!(ν+j)) = ∫₀¹ (1-r)^{ν-1} e^{-zr} dr.
    mp phi(const mp& z) const
    {
        mp term = 1;
        mp sum = 1 / nu_;
        const double zd = z.convert_to<double>();
        for (unsigned j = 1; j < 1000000; ++j) {
            term *= z / j;
            const mp add = term / (nu_ + j);
            sum += add;
            if (j > zd && add < epsilon_ * sum) {
                break;
            }
        }
        return exp(-z) * sum;
    }

    std::size_t n_;
    unsigned digits_;
    mp nu_;
    mp epsilon_;
    mp pi_;
    mp g2_prefactor_;
    const Rule& s_rule_;
    const Rule& w_rule_;
};

void check_lambdas(const std::vector<double>& lambdas, std::size_t n)
{
    const std::size_t p = lambdas.size();
    if (p == 0 || p % 2 != 0) {
        throw ValueError(
            "unsupported (odd p): the Pfaffian gap probability is implemented "
            "for even p only");
    }
    if (n == 0 || p > 2 * n) {
        throw ValueError("gap probability requires p <= 2n");
    }
    for (double l : lambdas) {
        if (!(l > 0.0) || !std::isfinite(l)) {
            throw ValueError("eigenvalues must be positive");
        }
    }
    auto sorted = lambdas;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 1; i < p; ++i) {
        if (sorted[i] - sorted[i - 1] < 1e-6 * sorted[i]) {
            throw ValueError("confluent kernel unsupported: eigenvalues closer "
                             "than 1e-6 relative");
        }
    }
}

unsigned precision_for(double t, const std::vector<double>& lambdas,
                       std::size_t n, unsigned extra)
{
    const double lmin = *std::min_element(lambdas.begin(), lambdas.end());
    const double lmax = *std::max_element(lambdas.begin(), lambdas.end());
    const double nd = static_cast<double>(n);
    const double pd = static_cast<double>(lambdas.size());
    const double x_max = nd * t / (2.0 * lmin);
    const double x_min = nd * t / (2.0 * lmax);
    double digits = 30.0 + 0.7 * nd;
    digits += std::max(0.0, (4.0 * nd - pd - 2.0) * std::log10(std::max(x_max, 1.0)));
    digits += std::max(0.0, 0.5 * pd * pd * -std::log10(std::min(x_min, 1.0)));
    return static_cast<unsigned>(std::ceil(digits / 8.0) * 8.0) + extra;
}

/// Core multiprecision evaluation of E(t).
double gap_cdf_mp(double t, const std::vector<double>& lambdas, std::size_t n,
                  unsigned digits, double node_factor)
{
    const std::size_t p = lambdas.size();
    const double x_max = static_cast<double>(n) * t /
                         (2.0 * *std::min_element(lambdas.begin(), lambdas.end()));
    std::lock_guard<std::mutex> lock(mp_mutex());
    PrecisionScope scope(digits);
    KernelEvaluator ev(n, digits, x_max, node_factor);

    std::vector<mp> xs(p);
    for (std::size_t a = 0; a < p; ++a) {
        xs[a] = mp(t) * static_cast<unsigned>(n) / (2 * mp(lambdas[a]));
    }
    const std::size_t terms = n - p / 2;
    std::vector<std::vector<std::pair<mp, mp>>> q(p);
    std::vector<std::pair<std::vector<mp>, std::vector<mp>>> f(p);
    for (std::size_t a = 0; a < p; ++a) {
        q[a] = ev.q_pairs(xs[a], terms);
        f[a] = ev.f_tables(xs[a]);
    }
    std::vector<mp> h(terms);
    for (std::size_t l = 0; l < terms; ++l) {
        h[l] = ev.h(l);
    }
    std::vector<mp> kernel(p * p, mp(0));
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a + 1; b < p; ++b) {
            mp k = ev.g2(f[a], f[b]);
            for (std::size_t l = 0; l < terms; ++l) {
                k -= (q[a][l].first * q[b][l].second -
                      q[b][l].first * q[a][l].second) / h[l];
            }
            kernel[a * p + b] = k;
            kernel[b * p + a] = -k;
        }
    }
    const mp pf = detail::pfaffian_dense(kernel, p);

    mp value = pf;
    for (std::size_t a = 0; a < p; ++a) {
        value *= pow(xs[a], static_cast<int>(2 * n));
        for (std::size_t b = a + 1; b < p; ++b) {
            value /= xs[b] - xs[a];
        }
    }
    for (std::size_t l = n - p / 2; l < n; ++l) {
        value /= ev.h(l);
    }
    return value.convert_to<double>();
}

}  // namespace

double SignedLog::value() const { return sign * std::exp(log_abs); }

SignedLog h_norm(std::size_t j, std::size_t n)
{
    if (j >= n) {
        throw ValueError("h_norm index out of range (0 <= j <= n-1)");
    }
    const double jd = static_cast<double>(j);
    const double nd = static_cast<double>(n);
    SignedLog out;
    out.sign = -1;
    out.log_abs = (2.0 * nd - 4.0 * jd + 1.0) * std::numbers::ln2 +
                  std::log(std::numbers::pi) + std::lgamma(2.0 * jd + 1.0) -
                  std::lgamma(2.0 * nd - 2.0 * jd);
    return out;
}

SignedLog inv_ktilde(std::size_t j, std::size_t n)
{
    if (j > n) {
        throw ValueError("inv_ktilde index out of range (0 <= j <= n)");
    }
    // ∏_{a=1}^{j} -2^{2n-4a+5} π (2a-2)!/(2n-2a+1)!, with the powers of two
    // and π collected: j(2n+1) - 2j(j-1) and j.
    const double jd = static_cast<double>(j);
    const double nd = static_cast<double>(n);
    SignedLog out;
    out.sign = (j % 2 == 0) ? 1 : -1;
    out.log_abs = (jd * (2.0 * nd + 1.0) - 2.0 * jd * (jd - 1.0)) * std::numbers::ln2 +
                  jd * std::log(std::numbers::pi);
    for (std::size_t a = 1; a <= j; ++a) {
        const double ad = static_cast<double>(a);
        out.log_abs += std::lgamma(2.0 * ad - 1.0) - std::lgamma(2.0 * nd - 2.0 * ad + 2.0);
    }
    return out;
}

QHatPair q_hat_pair(std::size_t l, std::size_t n, double x)
{
    if (l >= n) {
        throw ValueError("q_hat index out of range (0 <= l <= n-1)");
    }
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw ValueError("q_hat requires x > 0");
    }
    const unsigned digits = 40 + static_cast<unsigned>(n);
    std::lock_guard<std::mutex> lock(mp_mutex());
    PrecisionScope scope(digits);
    KernelEvaluator ev(n, digits, x, 1.0);
    const auto pairs = ev.q_pairs(mp(x), l + 1);
    return {pairs[l].first.convert_to<double>(), pairs[l].second.convert_to<double>()};
}

std::complex<double> q_hat(Parity parity, std::size_t l, std::size_t n, double x)
{
    const auto pair = q_hat_pair(l, n, x);
    return parity == Parity::even ? std::complex<double>(0.0, pair.even)
                                  : std::complex<double>(pair.odd, 0.0);
}

double kernel_g2(double x1, double x2, std::size_t n)
{
    if (!(x1 > 0.0) || !(x2 > 0.0)) {
        throw ValueError("kernel_g2 requires positive arguments");
    }
    if (n == 0) {
        throw ValueError("kernel_g2 requires n >= 1");
    }
    const unsigned digits = 40;
    std::lock_guard<std::mutex> lock(mp_mutex());
    PrecisionScope scope(digits);
    KernelEvaluator ev(n, digits, std::max(x1, x2), 1.0);
    return ev.g2(ev.f_tables(mp(x1)), ev.f_tables(mp(x2))).convert_to<double>();
}

Eigen::MatrixXd build_kernel(double t, const std::vector<double>& lambdas,
                             std::size_t n)
{
    check_lambdas(lambdas, n);
    if (!(t > 0.0)) {
        throw ValueError("build_kernel requires t > 0");
    }
    const std::size_t p = lambdas.size();
    const unsigned digits = precision_for(t, lambdas, n, 0);
    const double x_max = static_cast<double>(n) * t /
                         (2.0 * *std::min_element(lambdas.begin(), lambdas.end()));
    std::lock_guard<std::mutex> lock(mp_mutex());
    PrecisionScope scope(digits);
    KernelEvaluator ev(n, digits, x_max, 1.0);
    std::vector<mp> xs(p);
    std::vector<std::vector<std::pair<mp, mp>>> q(p);
    std::vector<std::pair<std::vector<mp>, std::vector<mp>>> f(p);
    const std::size_t terms = n - p / 2;
    for (std::size_t a = 0; a < p; ++a) {
        xs[a] = mp(t) * static_cast<unsigned>(n) / (2 * mp(lambdas[a]));
        q[a] = ev.q_pairs(xs[a], terms);
        f[a] = ev.f_tables(xs[a]);
    }
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                              static_cast<Eigen::Index>(p));
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a + 1; b < p; ++b) {
            mp v = ev.g2(f[a], f[b]);
            for (std::size_t l = 0; l < terms; ++l) {
                v -= (q[a][l].first * q[b][l].second -
                      q[b][l].first * q[a][l].second) / ev.h(l);
            }
            const double d = v.convert_to<double>();
            k(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = d;
            k(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(a)) = -d;
        }
    }
    return k;
}

double pfaffian(const Eigen::MatrixXd& a)
{
    detail::check_antisymmetric(a);
    const auto n = static_cast<std::size_t>(a.rows());
    std::vector<double> dense(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            dense[i * n + j] = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return detail::pfaffian_dense(dense, n);
}

SignedLog log_pfaffian(const Eigen::MatrixXd& a)
{
    detail::check_antisymmetric(a);
    const auto n = static_cast<std::size_t>(a.rows());
    std::vector<double> dense(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            dense[i * n + j] = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    const auto [log_abs, sign] = detail::log_pfaffian_dense(dense, n);
    return {log_abs, sign};
}

unsigned gap_cdf_precision(double t, const std::vector<double>& lambdas,
                           std::size_t n)
{
    check_lambdas(lambdas, n);
    return precision_for(t, lambdas, n, 0);
}

double gap_cdf(double t, const std::vector<double>& lambdas, std::size_t n,
               const GapCdfOptions& options)
{
    check_lambdas(lambdas, n);
    if (!std::isfinite(t)) {
        throw ValueError("gap_cdf requires finite t");
    }
    if (t <= 0.0) {
        return 0.0;
    }
    const unsigned digits = precision_for(t, lambdas, n, options.extra_digits);
    double e = gap_cdf_mp(t, lambdas, n, digits, 1.0);
    if (options.verify) {
        const double check = gap_cdf_mp(t, lambdas, n, digits + 24, 2.0);
        if (!(std::abs(check - e) <= 1e-9)) {
            throw NumericError("gap_cdf verification failed at t = " +
                               std::to_string(t) + " (" + std::to_string(e) +
                               " vs " + std::to_string(check) + ")");
        }
    }
    if (e < 0.0 && e >= -1e-6) {
        e = 0.0;
    } else if (e > 1.0 && e <= 1.0 + 1e-6) {
        e = 1.0;
    }
    return e;
}

double gap_cdf(double t, const EmpiricalSpectrum& s, std::size_t n,
               const GapCdfOptions& options)
{
    for (auto m : s.multiplicities()) {
        if (m * s.degeneracy_l() != 1) {
            throw ValueError("confluent kernel unsupported: gap_cdf needs "
                             "distinct eigenvalues of multiplicity one");
        }
    }
    return gap_cdf(t, s.values(), n, options);
}

double largest_eigenvalue_cdf(double x, const std::vector<double>& lambdas,
                              std::size_t n, const GapCdfOptions& options)
{
    return gap_cdf(2.0 * x, lambdas, n, options);
}

GapCdfTable gap_cdf_table(const std::vector<double>& ts,
                          const std::vector<double>& lambdas, std::size_t n,
                          const GapCdfOptions& options)
{
    GapCdfTable table;
    table.t = ts;
    table.lambdas = lambdas;
    table.n = n;
    table.e.reserve(ts.size());
    for (double t : ts) {
        table.e.push_back(gap_cdf(t, lambdas, n, options));
    }
    return table;
}

}  // namespace cwishart
