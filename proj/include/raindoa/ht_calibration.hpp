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

// Hermitian-Toeplitz least-squares calibration of a distorted sample covariance.
//
// Any M x M Hermitian Toeplitz matrix is  c_0 I + sum_{m=1}^{M-1} (c_m T_m + c_{m+M-1} Tt_m)
// where T_m has ones on diagonals +-m and Tt_m has +j on superdiagonal m and -j on
// subdiagonal m. The basis is orthogonal under Re tr(A B^H), so the least-squares
// coefficients of a Hermitian input reduce to per-diagonal averages. The
// projected matrix R_T = R_x .* R_b is then split into its unit-modulus phase
// pattern R_x and its magnitude R_b.

#include "raindoa/core.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace raindoa {

/// Implicit basis {Sigma_0, ..., Sigma_{2M-2}}; matrices are built on request only.
class HTBasis {
public:
    explicit HTBasis(int dimension) : m_(dimension)
    {
        if (dimension < 2)
            throw DomainError("HTBasis: dimension must be at least 2");
    }

    int dimension() const { return m_; }
    int size() const { return 2 * m_ - 1; }

    // Lag (diagonal offset) of basis element k, and whether it is the imaginary kind.
    int lag(int k) const { return k < m_ ? k : k - (m_ - 1); }
    bool imaginary(int k) const { return k >= m_; }

    double squared_norm(int k) const { return k == 0 ? m_ : 2.0 * (m_ - lag(k)); }

    CMatrix matrix(int k) const
    {
        if (k < 0 || k >= size())
            throw DomainError("HTBasis: index out of range");
        CMatrix s = CMatrix::Zero(m_, m_);
        const int l = lag(k);
        const cdouble upper = imaginary(k) ? cdouble(0.0, 1.0) : cdouble(1.0, 0.0);
        for (int i = 0; i + l < m_; ++i) {
            s(i, i + l) = upper;
            s(i + l, i) = std::conj(upper);
        }
        return s;
    }

    // Columns vec(Sigma_k), column-major vectorisation. M^2 x (2M-1).
    CMatrix stacked() const
    {
        CMatrix v(static_cast<Eigen::Index>(m_) * m_, size());
        for (int k = 0; k < size(); ++k)
            v.col(k) = matrix(k).reshaped();
        return v;
    }

private:
    int m_;
};

inline HTBasis ht_basis(int dimension) { return HTBasis(dimension); }

struct HTCoefficients {
    RVector c; // length 2M-1

    int dimension() const { return static_cast<int>((c.size() + 1) / 2); }
};

struct HTProjection {
    HTCoefficients coeffs;
    double residual = 0.0; // || A - sum c_k Sigma_k ||_F
};

/// Builds sum_k c_k Sigma_k. First row entry k is c_k + j c_{k+M-1}.
inline CMatrix reconstruct_ht(const HTCoefficients &coeffs)
{
    const auto n = coeffs.c.size();
    if (n < 3 || n % 2 == 0)
        throw DomainError("reconstruct_ht: coefficient vector must have odd length 2M-1 with M >= 2");
    if (!coeffs.c.allFinite())
        throw DomainError("reconstruct_ht: non-finite coefficient");
    const int m = coeffs.dimension();
    CMatrix r(m, m);
    for (int i = 0; i < m; ++i)
        r(i, i) = coeffs.c(0);
    for (int l = 1; l < m; ++l) {
        const cdouble v(coeffs.c(l), coeffs.c(l + m - 1));
        for (int i = 0; i + l < m; ++i) {
            r(i, i + l) = v;
            r(i + l, i) = std::conj(v);
        }
    }
    return r;
}

/// Least-squares projection onto the Hermitian Toeplitz subspace.
///
/// Equivalent to Re[(V^H V)^{-1} V^H vec(A)] for the stacked basis V, computed
/// as diagonal averages of the Hermitian part of A.
inline HTProjection ht_project(const CMatrix &a)
{
    if (a.rows() != a.cols())
        throw DomainError("ht_project: input must be square");
    if (a.rows() < 2)
        throw DomainError("ht_project: input must be at least 2 x 2");
    if (!a.allFinite())
        throw DomainError("ht_project: non-finite input");
    const auto m = a.rows();
    const CMatrix h = hermitian_part(a);

    HTProjection out;
    out.coeffs.c.resize(2 * m - 1);
    out.coeffs.c(0) = h.diagonal().real().mean();
    for (Eigen::Index l = 1; l < m; ++l) {
        cdouble sum = 0.0;
        for (Eigen::Index i = 0; i + l < m; ++i)
            sum += h(i, i + l);
        sum /= static_cast<double>(m - l);
        out.coeffs.c(l) = sum.real();
        out.coeffs.c(l + m - 1) = sum.imag();
    }
    out.residual = (a - reconstruct_ht(out.coeffs)).norm();
    return out;
}

struct CalibrationOutput {
    CMatrix rt_hat;  // projected Hermitian Toeplitz matrix
    CMatrix rx_hat;  // exp(j angle(rt_hat)), unit modulus
    RMatrix rb_hat;  // |rt_hat|
    HTCoefficients coeffs;
    double residual = 0.0;
};

/// Splits a Hermitian Toeplitz matrix into phase and magnitude parts.
/// Zero entries get phase 0.
inline CalibrationOutput decouple(const CMatrix &rt)
{
    if (rt.rows() != rt.cols())
        throw DomainError("decouple: input must be square");
    CalibrationOutput out;
    out.rt_hat = rt;
    out.rb_hat = rt.cwiseAbs();
    out.rx_hat.resize(rt.rows(), rt.cols());
    for (Eigen::Index j = 0; j < rt.cols(); ++j)
        for (Eigen::Index i = 0; i < rt.rows(); ++i) {
            const cdouble z = rt(i, j);
            out.rx_hat(i, j) = (z == cdouble{}) ? cdouble{1.0, 0.0} : std::polar(1.0, std::arg(z));
        }
    return out;
}

struct CalibrationOptions {
    // Clip negative eigenvalues of the projected matrix before decoupling.
    bool psd_clip = false;
};

/// Hermitian Toeplitz projection of a sample covariance followed by phase/magnitude
/// decoupling. The diagonal of rb_hat carries any white-noise power.
inline CalibrationOutput calibrate(const CMatrix &ry, const CalibrationOptions &opt = {})
{
    HTProjection proj = ht_project(ry);
    CMatrix rt = reconstruct_ht(proj.coeffs);
    if (opt.psd_clip) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(rt);
        RVector ev = es.eigenvalues().cwiseMax(0.0);
        rt = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
        rt = hermitian_part(rt);
    }
    CalibrationOutput out = decouple(rt);
    out.coeffs = std::move(proj.coeffs);
    out.residual = proj.residual;
    return out;
}

} // namespace raindoa
