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

#include "cwishart/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cwishart/error.hpp"

namespace cwishart {

namespace {

constexpr double merge_tolerance = 1e-12;

}  // namespace

EmpiricalSpectrum::EmpiricalSpectrum(
    std::vector<std::pair<double, std::size_t>> entries,
    std::size_t degeneracy_l)
    : degeneracy_l_(degeneracy_l)
{
    if (entries.empty()) {
        throw ValueError("empty spectrum");
    }
    if (degeneracy_l == 0) {
        throw ValueError("degeneracy factor must be a positive integer");
    }
    for (const auto& [value, mult] : entries) {
        if (!std::isfinite(value) || value <= 0.0) {
            throw ValueError("nonpositive eigenvalue " + std::to_string(value));
        }
        if (mult == 0) {
            throw ValueError("multiplicity must be positive");
        }
    }
    std::sort(entries.begin(), entries.end());
    for (const auto& [value, mult] : entries) {
        if (!values_.empty() &&
            value - values_.back() <= merge_tolerance * value) {
            multiplicities_.back() += mult;
        } else {
            values_.push_back(value);
            multiplicities_.push_back(mult);
        }
        p_ += mult;
    }
}

EmpiricalSpectrum EmpiricalSpectrum::from_eigenvalues(
    const std::vector<double>& eigs, std::size_t degeneracy_l)
{
    std::vector<std::pair<double, std::size_t>> entries;
    entries.reserve(eigs.size());
    for (double v : eigs) {
        entries.emplace_back(v, 1);
    }
    return EmpiricalSpectrum(std::move(entries), degeneracy_l);
}

std::vector<double> EmpiricalSpectrum::weights() const
{
    std::vector<double> w(values_.size());
    const double total = static_cast<double>(p_);
    for (std::size_t i = 0; i < values_.size(); ++i) {
        w[i] = static_cast<double>(multiplicities_[i]) / total;
    }
    return w;
}

double EmpiricalSpectrum::mean() const
{
    const auto w = weights();
    double m = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        m += w[i] * values_[i];
    }
    return m;
}

std::vector<double> EmpiricalSpectrum::flattened() const
{
    std::vector<double> out;
    out.reserve(effective_dimension());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        out.insert(out.end(), multiplicities_[i] * degeneracy_l_, values_[i]);
    }
    return out;
}

AspectRatio::AspectRatio(double gamma_sq) : gamma_sq_(gamma_sq)
{
    if (!(gamma_sq > 0.0 && gamma_sq <= 1.0)) {
        throw ValueError("aspect ratio gamma^2 must lie in (0, 1], got " +
                         std::to_string(gamma_sq));
    }
}

AspectRatio AspectRatio::from_dimensions(std::size_t p, std::size_t n)
{
    if (p == 0 || n == 0) {
        throw ValueError("dimensions must be positive");
    }
    if (n < p) {
        throw ValueError("n must be at least p (n=" + std::to_string(n) +
                         ", p=" + std::to_string(p) + ")");
    }
    return AspectRatio(static_cast<double>(p) / static_cast<double>(n));
}

double AspectRatio::gamma() const { return std::sqrt(gamma_sq_); }

EmpiricalSpectrum parse_spectrum(std::istream& in, const std::string& source)
{
    std::vector<std::pair<double, std::size_t>> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        std::istringstream fields(line);
        double value = 0.0;
        if (!(fields >> value)) {
            throw ValueError(source + ":" + std::to_string(line_no) +
                             ": cannot parse eigenvalue");
        }
        long long mult = 1;
        if (!(fields >> mult)) {
            mult = 1;
            fields.clear();
        }
        std::string rest;
        if (fields >> rest) {
            throw ValueError(source + ":" + std::to_string(line_no) +
                             ": unexpected trailing field '" + rest + "'");
        }
        if (!std::isfinite(value) || value <= 0.0) {
            throw ValueError(source + ":" + std::to_string(line_no) +
                             ": nonpositive eigenvalue");
        }
        if (mult <= 0) {
            throw ValueError(source + ":" + std::to_string(line_no) +
                             ": multiplicity must be positive");
        }
        entries.emplace_back(value, static_cast<std::size_t>(mult));
    }
    if (entries.empty()) {
        throw ValueError(source + ": empty spectrum");
    }
    return EmpiricalSpectrum(std::move(entries));
}

EmpiricalSpectrum load_spectrum(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open spectrum file " + path.string());
    }
    return parse_spectrum(in, path.string());
}

void write_spectrum(std::ostream& out, const EmpiricalSpectrum& s)
{
    const auto old_precision = out.precision(17);
    for (std::size_t i = 0; i < s.distinct(); ++i) {
        out << s.values()[i] << ' '
            << s.multiplicities()[i] * s.degeneracy_l() << '\n';
    }
    out.precision(old_precision);
}

EmpiricalSpectrum degenerate_spectrum(const EmpiricalSpectrum& s,
                                      std::size_t l)
{
    if (l == 0) {
        throw ValueError("degeneracy factor must be a positive integer");
    }
    std::vector<std::pair<double, std::size_t>> entries;
    for (std::size_t i = 0; i < s.distinct(); ++i) {
        entries.emplace_back(s.values()[i], s.multiplicities()[i]);
    }
    return EmpiricalSpectrum(std::move(entries), s.degeneracy_l() * l);
}

EmpiricalSpectrum expand_degeneracy(const EmpiricalSpectrum& s)
{
    std::vector<std::pair<double, std::size_t>> entries;
    for (std::size_t i = 0; i < s.distinct(); ++i) {
        entries.emplace_back(s.values()[i],
                             s.multiplicities()[i] * s.degeneracy_l());
    }
    return EmpiricalSpectrum(std::move(entries), 1);
}

}  // namespace cwishart
