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

// Narrowband single-source ULA snapshots with multiplicative per-element
// distortion:  y(t) = [a(theta) .* b(t)] s(t) + n(t).

#include "raindoa/array_config.hpp"
#include "raindoa/core.hpp"
#include "raindoa/distortion_model.hpp"

#include <cmath>
#include <optional>

namespace raindoa {

struct SourceConfig {
    double theta_deg = 40.0;   // broadside = 0
    double signal_power = 1.0; // sigma_s^2
    double noise_power = 0.0;  // sigma_n^2, white

    void validate() const
    {
        if (!(std::abs(theta_deg) < 90.0))
            throw DomainError("SourceConfig: theta must lie in (-90, 90) degrees");
        if (!(signal_power > 0.0))
            throw DomainError("SourceConfig: signal power must be positive");
        if (!(noise_power >= 0.0))
            throw DomainError("SourceConfig: noise power must be nonnegative");
    }
};

// SNR = per-element mean received signal power over noise power,
// i.e. sigma_s^2 * 2 lambda11 / sigma_n^2.
inline double noise_power_for_snr(double snr_db, double signal_power, double distortion_variance = 1.0)
{
    return signal_power * distortion_variance / std::pow(10.0, snr_db / 10.0);
}

struct SnapshotSet {
    CMatrix data; // M x T
    std::uint64_t seed = 0;
    ArrayConfig array;
    SourceConfig source;
    std::optional<RainScenario> scenario;

    Eigen::Index n_elements() const { return data.rows(); }
    Eigen::Index n_snapshots() const { return data.cols(); }
};

/// a(theta)_m = exp(j 2 pi m Delta sin(theta)), m = 0..M-1.
inline CVector steering_vector(const ArrayConfig &array, double theta_deg)
{
    if (!(std::abs(theta_deg) < 90.0))
        throw DomainError("steering_vector: theta must lie in (-90, 90) degrees");
    const double psi = 2.0 * pi * array.spacing * std::sin(deg2rad(theta_deg));
    CVector a(array.n_elements);
    for (int m = 0; m < array.n_elements; ++m)
        a(m) = std::polar(1.0, psi * m);
    return a;
}

inline constexpr std::uint64_t kStreamSnapshots = 0x5AA9;

/// Draws T snapshots. Without a distortion covariance b(t) is all ones.
/// Distortion is redrawn independently for every snapshot.
inline SnapshotSet synthesize_snapshots(const ArrayConfig &array, const SourceConfig &source,
                                        const DistortionCovariance *distortion, std::size_t n_snapshots,
                                        std::uint64_t seed, unsigned n_threads = 1)
{
    array.validate();
    source.validate();
    if (n_snapshots < 1)
        throw DomainError("synthesize_snapshots: need at least one snapshot");
    const Eigen::Index m = array.n_elements;
    if (distortion && distortion->size() != m)
        throw DomainError("synthesize_snapshots: distortion covariance size does not match the array");

    CMatrix factor;
    if (distortion)
        factor = covariance_factor(distortion->matrix()).cast<cdouble>();
    const CVector a = steering_vector(array, source.theta_deg);
    const double sig_amp = std::sqrt(source.signal_power);
    const double noise_amp = std::sqrt(source.noise_power);

    SnapshotSet out;
    out.seed = seed;
    out.array = array;
    out.source = source;
    out.data.resize(m, static_cast<Eigen::Index>(n_snapshots));

    std::size_t n_blocks = (n_snapshots + kSnapshotBlock - 1) / kSnapshotBlock;
    parallel_for(n_blocks, n_threads, [&](std::size_t blk) {
        GaussianSource g(derive_seed(seed, kStreamSnapshots, blk));
        CVector z(m), b = CVector::Ones(m);
        std::size_t end = std::min(n_snapshots, (blk + 1) * kSnapshotBlock);
        for (std::size_t t = blk * kSnapshotBlock; t < end; ++t) {
            if (distortion) {
                for (Eigen::Index i = 0; i < m; ++i)
                    z(i) = g.cscg();
                b.noalias() = factor * z;
            }
            cdouble s = sig_amp * g.cscg();
            auto col = out.data.col(static_cast<Eigen::Index>(t));
            for (Eigen::Index i = 0; i < m; ++i) {
                cdouble noise = noise_amp > 0.0 ? noise_amp * g.cscg() : cdouble{};
                col(i) = a(i) * b(i) * s + noise;
            }
        }
    });
    return out;
}

/// (1/T) sum_t y(t) y(t)^H, made exactly Hermitian.
inline CMatrix sample_covariance(const CMatrix &data)
{
    if (data.cols() < 1 || data.rows() < 1)
        throw DomainError("sample_covariance: empty snapshot set");
    CMatrix r = CMatrix::Zero(data.rows(), data.rows());
    r.selfadjointView<Eigen::Lower>().rankUpdate(data, 1.0 / static_cast<double>(data.cols()));
    CMatrix full = r.selfadjointView<Eigen::Lower>();
    return hermitian_part(full);
}

inline CMatrix sample_covariance(const SnapshotSet &snapshots) { return sample_covariance(snapshots.data); }

/// sigma_s^2 a a^H .* R_b + sigma_n^2 I. Without distortion R_b is all ones.
inline CMatrix analytic_covariance(const ArrayConfig &array, const SourceConfig &source,
                                   const DistortionCovariance *distortion)
{
    array.validate();
    source.validate();
    const Eigen::Index m = array.n_elements;
    const CVector a = steering_vector(array, source.theta_deg);
    CMatrix r = source.signal_power * (a * a.adjoint());
    if (distortion) {
        if (distortion->size() != m)
            throw DomainError("analytic_covariance: distortion covariance size does not match the array");
        r = r.cwiseProduct(distortion->matrix().cast<cdouble>());
    }
    r.diagonal().array() += source.noise_power;
    return r;
}

} // namespace raindoa
