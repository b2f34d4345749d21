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
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace cwishart {

/// Eigenvalues Λ of the empirical correlation matrix C.
///
/// Distinct values are stored in strictly increasing order together with
/// their multiplicities.  The degeneracy factor l describes the ensemble
/// correlated with C ⊗ 1_l; the effective ensemble dimension is l·p.
class EmpiricalSpectrum
{
public:
    EmpiricalSpectrum() = default;

    /// Build from (value, multiplicity) pairs.  Values are sorted and
    /// entries closer than 1e-12 relative distance are merged.
    /// Throws ValueError on nonpositive values, zero multiplicities or an
    /// empty input.
    EmpiricalSpectrum(std::vector<std::pair<double, std::size_t>> entries,
                      std::size_t degeneracy_l = 1);

    /// Build from a plain list of eigenvalues (duplicates are merged).
    static EmpiricalSpectrum from_eigenvalues(const std::vector<double>& eigs,
                                              std::size_t degeneracy_l = 1);

    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<std::size_t>& multiplicities() const noexcept
    {
        return multiplicities_;
    }
    std::size_t degeneracy_l() const noexcept { return degeneracy_l_; }

    /// Number of distinct values.
    std::size_t distinct() const noexcept { return values_.size(); }
    /// Σ multiplicities (dimension of C).
    std::size_t p() const noexcept { return p_; }
    /// l·p, the dimension of the simulated ensemble.
    std::size_t effective_dimension() const noexcept
    {
        return degeneracy_l_ * p_;
    }

    /// Normalised weights multᵢ/p of the empirical eigenvalue measure.
    ///
    /// The weights are identical (bitwise) for Λ and for any expansion of
    /// Λ ⊗ 1_l, which makes every analytic quantity built on them exactly
    /// degeneracy invariant.
    std::vector<double> weights() const;

    /// Mean eigenvalue Σ multᵢΛᵢ/p.
    double mean() const;

    /// All l·p eigenvalues in ascending order, repeated per multiplicity
    /// and degeneracy.
    std::vector<double> flattened() const;

private:
    std::vector<double> values_;
    std::vector<std::size_t> multiplicities_;
    std::size_t p_ = 0;
    std::size_t degeneracy_l_ = 1;
};

/// Aspect ratio γ² = p/n of the ensemble, 0 < γ² ≤ 1.
class AspectRatio
{
public:
    explicit AspectRatio(double gamma_sq);
    static AspectRatio from_dimensions(std::size_t p, std::size_t n);

    double gamma_sq() const noexcept { return gamma_sq_; }
    double gamma() const;

private:
    double gamma_sq_;
};

/// Parse the spectrum text format: one "value [multiplicity]" per line,
/// blank lines and lines starting with '#' ignored.  `source` names the
/// input in diagnostics.
EmpiricalSpectrum parse_spectrum(std::istream& in,
                                 const std::string& source = "<stream>");

/// Load a spectrum file (see parse_spectrum).  Throws IoError when the file
/// cannot be opened.
EmpiricalSpectrum load_spectrum(const std::filesystem::path& path);

/// Write a spectrum in the text format accepted by parse_spectrum.  The
/// degeneracy factor is expanded into the multiplicities.
void write_spectrum(std::ostream& out, const EmpiricalSpectrum& s);

/// Spectrum of C ⊗ 1_l: the degeneracy factor is multiplied by l while the
/// distinct values and multiplicities are kept.
EmpiricalSpectrum degenerate_spectrum(const EmpiricalSpectrum& s,
                                      std::size_t l);

/// Fold the degeneracy factor into the multiplicities, i.e. return the same
/// eigenvalue list with degeneracy_l == 1.
EmpiricalSpectrum expand_degeneracy(const EmpiricalSpectrum& s);

}  // namespace cwishart
