// SPDX-License-Identifier: Apache-2.0
//
// raindoa: direction finding for uniform linear arrays under rain-induced distortion
// Copyright (C) 2026 The raindoa authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#pragma once

// Subspace direction-of-arrival estimators for a uniform linear array:
// spectral MUSIC on an angle grid and root-MUSIC by polynomial rooting.

#include "raindoa/core.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace raindoa {

struct SubspaceDecomposition {
    RVector eigenvalues;    // descending
    CMatrix noise_subspace; // M x (M-K), eigenvectors of the M-K smallest eigenvalues
    CMatrix signal_subspace;
    int n_sources = 1;
    bool degenerate_gap = false; // lambda_K - lambda_{K+1} < 1e-12 lambda_1
};

inline SubspaceDecomposition subspace(const CMatrix &r, int n_sources)
{
    if (r.rows() != r.cols())
        throw DomainError("subspace: covariance must be square");
    const auto m = static_cast<int>(r.rows());
    if (n_sources < 1 || n_sources >= m)
        throw DomainError("subspace: need 1 <= K < M");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(r));
    if (es.info() != Eigen::Success)
        throw DecompositionError("subspace: eigendecomposition failed");

    SubspaceDecomposition out;
    out.n_sources = n_sources;
    out.eigenvalues = es.eigenvalues().reverse();
    out.noise_subspace = es.eigenvectors().leftCols(m - n_sources);
    out.signal_subspace = es.eigenvectors().rightCols(n_sources).rowwise().reverse();
    const double gap = out.eigenvalues(n_sources - 1) - out.eigenvalues(n_sources);
    out.degenerate_gap = gap < 1e-12 * std::abs(out.eigenvalues(0));
    return out;
}

// Steering vector for spacing Delta (in wavelengths) without array bookkeeping.
inline CVector ula_steering(int n_elements, double spacing, double theta_deg)
{
    const double psi = 2.0 * pi * spacing * std::sin(deg2rad(theta_deg));
    CVector a(n_elements);
    for (int m = 0; m < n_elements; ++m)
        a(m) = std::polar(1.0, psi * m);
    return a;
}

/// Open interval (-90, 90) sampled every `step_deg`.
inline std::vector<double> angle_grid(double step_deg = 0.1)
{
    if (!(step_deg > 0.0) || step_deg >= 90.0)
        throw DomainError("angle_grid: step must lie in (0, 90)");
    const auto n = static_cast<long>(std::ceil(180.0 / step_deg - 1e-9)) - 1;
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n));
    for (long i = 1; i <= n; ++i) {
        double th = -90.0 + i * step_deg;
        if (th < 90.0)
            grid.push_back(th);
    }
    return grid;
}

struct SpectrumResult {
    std::vector<double> grid_deg;
    std::vector<double> spectrum_db; // max-normalised to 0 dB
    std::vector<double> peak_angles_deg; // sorted by peak height, highest first
    std::vector<double> peak_values_db;

    // dB gap between the main peak and the highest secondary local maximum;
    // the full dynamic range when there is no secondary peak.
    double prominence_db() const
    {
        if (peak_values_db.empty())
            return 0.0;
        if (peak_values_db.size() >= 2)
            return peak_values_db[0] - peak_values_db[1];
        return peak_values_db[0] - *std::min_element(spectrum_db.begin(), spectrum_db.end());
    }
};

inline constexpr double kMusicDenominatorFloor = 1e-15;

/// P(theta) = 1 / (a^H En En^H a) on `grid_deg`, in dB relative to its maximum.
inline SpectrumResult music_spectrum(const CMatrix &r, int n_sources, double spacing,
                                     const std::vector<double> &grid_deg)
{
    if (grid_deg.empty())
        throw DomainError("music_spectrum: empty grid");
    for (std::size_t i = 0; i < grid_deg.size(); ++i) {
        if (!(std::abs(grid_deg[i]) < 90.0))
            throw DomainError("music_spectrum: grid must lie inside (-90, 90)");
        if (i > 0 && !(grid_deg[i] > grid_deg[i - 1]))
            throw DomainError("music_spectrum: grid must be strictly increasing");
    }
    const SubspaceDecomposition sub = subspace(r, n_sources);
    const auto m = static_cast<int>(r.rows());
    const CMatrix proj = sub.noise_subspace * sub.noise_subspace.adjoint();

    SpectrumResult out;
    out.grid_deg = grid_deg;
    out.spectrum_db.resize(grid_deg.size());
    for (std::size_t i = 0; i < grid_deg.size(); ++i) {
        const CVector a = ula_steering(m, spacing, grid_deg[i]);
        const double den = std::max(std::real(a.dot(proj * a)), kMusicDenominatorFloor);
        out.spectrum_db[i] = -10.0 * std::log10(den);
    }
    const double peak = *std::max_element(out.spectrum_db.begin(), out.spectrum_db.end());
    for (double &v : out.spectrum_db)
        v -= peak;

    // interior local maxima; an endpoint counts only if it holds the global maximum
    std::vector<std::size_t> idx;
    const std::size_t n = out.spectrum_db.size();
    const auto &s = out.spectrum_db;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (s[i] > s[i - 1] && s[i] >= s[i + 1])
            idx.push_back(i);
    const auto gmax = static_cast<std::size_t>(std::max_element(s.begin(), s.end()) - s.begin());
    if (std::find(idx.begin(), idx.end(), gmax) == idx.end())
        idx.push_back(gmax);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return s[x] > s[y]; });
    for (auto i : idx) {
        out.peak_angles_deg.push_back(out.grid_deg[i]);
        out.peak_values_db.push_back(s[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Polynomial roots

namespace detail {

// Diagonal similarity scaling so that row and column norms are comparable
// (Parlett-Reinsch, radix 2).
inline void balance(CMatrix &a)
{
    const Eigen::Index n = a.rows();
    bool converged = false;
    for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
        converged = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0.0, r = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (j == i)
                    continue;
                c += std::abs(a(j, i));
                r += std::abs(a(i, j));
            }
            if (c == 0.0 || r == 0.0)
                continue;
            double g = r / 2.0, f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= 2.0;
                c *= 4.0;
            }
            g = r * 2.0;
            while (c > g) {
                f /= 2.0;
                c /= 4.0;
            }
            if ((c + r) / f < 0.95 * s) {
                converged = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

} // namespace detail

/// Roots of sum_p coeffs[p] z^p via eigenvalues of the balanced companion matrix.
/// Leading coefficients that vanish relative to the largest are dropped.
inline std::vector<cdouble> polynomial_roots(std::vector<cdouble> coeffs)
{
    double cmax = 0.0;
    for (const auto &c : coeffs)
        cmax = std::max(cmax, std::abs(c));
    if (cmax == 0.0)
        throw DomainError("polynomial_roots: zero polynomial");
    while (!coeffs.empty() && std::abs(coeffs.back()) <= 1e-14 * cmax)
        coeffs.pop_back();
    const auto degree = static_cast<Eigen::Index>(coeffs.size()) - 1;
    if (degree < 1)
        return {};
    CMatrix comp = CMatrix::Zero(degree, degree);
    const cdouble lead = coeffs.back();
    for (Eigen::Index j = 0; j < degree; ++j)
        comp(0, j) = -coeffs[static_cast<std::size_t>(degree - 1 - j)] / lead;
    for (Eigen::Index i = 1; i < degree; ++i)
        comp(i, i - 1) = 1.0;
    detail::balance(comp);
    Eigen::ComplexEigenSolver<CMatrix> es(comp, false);
    if (es.info() != Eigen::Success)
        throw DecompositionError("polynomial_roots: companion eigenvalues did not converge");
    std::vector<cdouble> roots(static_cast<std::size_t>(degree));
    for (Eigen::Index i = 0; i < degree; ++i)
        roots[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
    return roots;
}

struct DoaEstimate {
    double theta_deg = 0.0;
    bool valid = true;
    std::string method;
};

struct RootMusicResult {
    std::vector<DoaEstimate> estimates;
    std::vector<cdouble> roots;    // all polynomial roots
    std::vector<cdouble> selected; // the K roots used
};

// Roots this far outside the unit circle still count as "on" it; exact rank-one
// inputs produce a double root that rounding splits by about sqrt(eps).
inline constexpr double kUnitCircleSlack = 1e-6;

/// Coefficients (ascending powers) of z^{M-1} a(z)^H En En^H a(z), where the
/// coefficient of z^{k+M-1} is the sum of the k-th superdiagonal of En En^H.
inline std::vector<cdouble> root_music_polynomial(const CMatrix &noise_projector)
{
    const auto m = noise_projector.rows();
    const CMatrix c = hermitian_part(noise_projector);
    std::vector<cdouble> poly(static_cast<std::size_t>(2 * m - 1));
    for (Eigen::Index k = 0; k < m; ++k) {
        cdouble s = 0.0;
        for (Eigen::Index i = 0; i + k < m; ++i)
            s += c(i, i + k);
        poly[static_cast<std::size_t>(m - 1 + k)] = s;
        poly[static_cast<std::size_t>(m - 1 - k)] = std::conj(s);
    }
    poly[static_cast<std::size_t>(m - 1)] = poly[static_cast<std::size_t>(m - 1)].real();
    return poly;
}

/// Root-MUSIC for a ULA with element spacing `spacing` (wavelengths).
/// Picks the K roots inside (or on) the unit circle nearest to it and maps their
/// phase w to theta = asin(w / (2 pi Delta)); |w| > 2 pi Delta marks the estimate invalid.
inline RootMusicResult root_music(const CMatrix &r, int n_sources, double spacing)
{
    if (!(spacing > 0.0))
        throw DomainError("root_music: spacing must be positive");
    const SubspaceDecomposition sub = subspace(r, n_sources);
    const CMatrix proj = sub.noise_subspace * sub.noise_subspace.adjoint();

    RootMusicResult out;
    out.roots = polynomial_roots(root_music_polynomial(proj));

    std::vector<cdouble> cand;
    for (const auto &z : out.roots)
        if (std::abs(z) <= 1.0 + kUnitCircleSlack)
            cand.push_back(z);
    std::stable_sort(cand.begin(), cand.end(), [](cdouble x, cdouble y) {
        return std::abs(1.0 - std::abs(x)) < std::abs(1.0 - std::abs(y));
    });
    for (const auto &z : cand) {
        if (static_cast<int>(out.selected.size()) == n_sources)
            break;
        bool partner = false;
        for (const auto &w : out.selected)
            if (std::abs(z - 1.0 / std::conj(w)) < kUnitCircleSlack * 100)
                partner = true;
        if (!partner)
            out.selected.push_back(z);
    }
    const double wmax = 2.0 * pi * spacing;
    for (const auto &z : out.selected) {
        DoaEstimate e;
        e.method = "root_music";
        const double w = std::arg(z);
        if (std::abs(w) > wmax) {
            e.valid = false;
            e.theta_deg = w > 0 ? 90.0 : -90.0;
        } else {
            e.theta_deg = rad2deg(std::asin(w / wmax));
        }
        out.estimates.push_back(e);
    }
    while (static_cast<int>(out.estimates.size()) < n_sources)
        out.estimates.push_back({0.0, false, "root_music"});
    return out;
}

/// Single-source spectral MUSIC estimate: the highest peak on the grid.
inline DoaEstimate music_estimate(const CMatrix &r, double spacing, const std::vector<double> &grid_deg)
{
    SpectrumResult s = music_spectrum(r, 1, spacing, grid_deg);
    return {s.peak_angles_deg.front(), true, "music"};
}

} // namespace raindoa
