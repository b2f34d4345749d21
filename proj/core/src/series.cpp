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

#include "cwishart/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "cwishart/error.hpp"
#include "cwishart/random.hpp"

namespace cwishart {

CorrelationMatrix::CorrelationMatrix(Eigen::MatrixXd entries)
    : entries_(std::move(entries))
{
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
        throw ValueError("correlation matrix must be square and nonempty");
    }
    if (!entries_.allFinite()) {
        throw ValueError("correlation matrix has non-finite entries");
    }
    const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
    if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() >
        1e-12 * scale) {
        throw ValueError("correlation matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        entries_, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericError("eigenvalue decomposition of C failed");
    }
    eigs_ = solver.eigenvalues();
    const double top = std::max(eigs_.maxCoeff(), 0.0);
    if (eigs_.minCoeff() < -1e-10 * std::max(top, 1.0)) {
        throw ValueError("correlation matrix is not positive semidefinite");
    }
}

EmpiricalSpectrum CorrelationMatrix::spectrum(std::size_t degeneracy_l) const
{
    std::vector<double> eigs(eigs_.data(), eigs_.data() + eigs_.size());
    const double top = *std::max_element(eigs.begin(), eigs.end());
    for (double v : eigs) {
        if (v <= 1e-12 * top) {
            throw ValueError(
                "correlation matrix is singular; its spectrum has a zero "
                "eigenvalue");
        }
    }
    return EmpiricalSpectrum::from_eigenvalues(eigs, degeneracy_l);
}

std::size_t OneFactorConfig::p() const
{
    return std::accumulate(block_sizes.begin(), block_sizes.end(),
                           std::size_t{0});
}

void OneFactorConfig::validate() const
{
    if (block_sizes.empty()) {
        throw ValueError("one-factor model needs at least one block");
    }
    for (auto b : block_sizes) {
        if (b == 0) {
            throw ValueError("block sizes must be positive");
        }
    }
    if (n < p()) {
        throw ValueError("series length n must be at least p");
    }
    if (!(s_noise >= 0.0) || !std::isfinite(s_noise)) {
        throw ValueError("noise strength must be nonnegative");
    }
}

TimeSeriesMatrix one_factor_series(const OneFactorConfig& cfg)
{
    cfg.validate();
    const auto p = static_cast<Eigen::Index>(cfg.p());
    const auto n = static_cast<Eigen::Index>(cfg.n);
    Engine engine = make_stream(cfg.seed, 0);
    std::normal_distribution<double> normal;

    TimeSeriesMatrix t(p, n);
    Eigen::Index row = 0;
    for (auto size : cfg.block_sizes) {
        Eigen::RowVectorXd factor(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            factor(j) = normal(engine);
        }
        for (std::size_t r = 0; r < size; ++r) {
            t.row(row++) = factor;
        }
    }
    // The noise amplitude s_noise/√n keeps the sector correlations of
    // order one for the series lengths used in practice.
    const double amplitude = cfg.s_noise / std::sqrt(static_cast<double>(cfg.n));
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            t(i, j) += amplitude * normal(engine);
        }
    }
    return t;
}

CorrelationMatrix estimate_correlation(const TimeSeriesMatrix& t)
{
    if (t.rows() == 0 || t.cols() < 2) {
        throw ValueError("time series matrix needs at least 2 columns");
    }
    if (!t.allFinite()) {
        throw ValueError("time series contain non-finite entries");
    }
    const double n = static_cast<double>(t.cols());
    Eigen::MatrixXd z = t.colwise() - t.rowwise().mean();
    for (Eigen::Index i = 0; i < z.rows(); ++i) {
        const double var = z.row(i).squaredNorm() / n;
        const double amplitude = t.row(i).cwiseAbs().maxCoeff();
        if (!(var > 1e-28 * std::max(1.0, amplitude * amplitude))) {
            throw ValueError("zero-variance series in row " +
                             std::to_string(i));
        }
        z.row(i) /= std::sqrt(var);
    }
    Eigen::MatrixXd c = (z * z.transpose()) / n;
    c = 0.5 * (c + c.transpose()).eval();
    c.diagonal().setOnes();
    return CorrelationMatrix(std::move(c));
}

Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& c, std::size_t l)
{
    if (l == 0) {
        throw ValueError("degeneracy factor must be a positive integer");
    }
    const auto L = static_cast<Eigen::Index>(l);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(c.rows() * L, c.cols() * L);
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
        for (Eigen::Index j = 0; j < c.cols(); ++j) {
            for (Eigen::Index k = 0; k < L; ++k) {
                out(i * L + k, j * L + k) = c(i, j);
            }
        }
    }
    return out;
}

Eigen::MatrixXd diagonal_matrix(const EmpiricalSpectrum& s)
{
    const auto flat = s.flattened();
    Eigen::VectorXd d(static_cast<Eigen::Index>(flat.size()));
    for (std::size_t i = 0; i < flat.size(); ++i) {
        d(static_cast<Eigen::Index>(i)) = flat[i];
    }
    return d.asDiagonal();
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& out)
{
    out.clear();
    std::stringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) {
        const auto first = cell.find_first_not_of(" \t\r");
        if (first == std::string::npos) {
            return false;
        }
        const char* begin = cell.c_str() + first;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) {
            return false;
        }
        for (; *end != '\0'; ++end) {
            if (*end != ' ' && *end != '\t' && *end != '\r') {
                return false;
            }
        }
        out.push_back(v);
    }
    return !out.empty();
}

}  // namespace

TimeSeriesMatrix parse_series_csv(std::istream& in, const std::string& source)
{
    std::vector<std::vector<double>> rows;
    std::vector<double> row;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        if (!parse_row(line, row)) {
            if (rows.empty() && line_no == 1) {
                continue;  // header row
            }
            throw ValueError(source + ":" + std::to_string(line_no) +
                             ": cannot parse numeric row");
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw ValueError(source + ":" + std::to_string(line_no) +
                             ": row length differs from the first row");
        }
        rows.push_back(row);
    }
    if (rows.empty()) {
        throw ValueError(source + ": no time series found");
    }
    TimeSeriesMatrix t(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j];
        }
    }
    return t;
}

TimeSeriesMatrix load_series_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open time-series file " + path.string());
    }
    return parse_series_csv(in, path.string());
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m)
{
    const auto old_precision = out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << (j ? "," : "") << m(i, j);
        }
        out << '\n';
    }
    out.precision(old_precision);
}

}  // namespace cwishart
