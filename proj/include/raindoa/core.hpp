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

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace raindoa {

using cdouble = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;

inline double deg2rad(double deg) { return deg * pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / pi; }

// Error hierarchy. `kind()` is the machine-readable tag reported by the CLI.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string &what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string &kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string &what) : Error("domain_error", what) {}
};

struct FitError : Error {
    explicit FitError(const std::string &what) : Error("fit_error", what) {}
};

struct DecompositionError : Error {
    explicit DecompositionError(const std::string &what) : Error("decomposition_error", what) {}
};

struct IoError : Error {
    explicit IoError(const std::string &what) : Error("io_error", what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string &what) : Error("config_error", what) {}
};

// ---------------------------------------------------------------------------
// Seeding
//
// Every random quantity is drawn from an mt19937_64 whose seed is derived from
// (master seed, stream tag, counters) through splitmix64. Work units therefore
// own independent streams and results do not depend on scheduling.

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a)
{
    return splitmix64(splitmix64(seed) ^ (a + 0x632BE59BD9B4E019ULL));
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b)
{
    return derive_seed(derive_seed(seed, a), b);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c)
{
    return derive_seed(derive_seed(seed, a, b), c);
}

using Rng = std::mt19937_64;

// Draws standard circularly symmetric complex Gaussians (E|z|^2 = 1, E z^2 = 0)
// and real standard normals from one seeded engine.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

    cdouble cscg()
    {
        double re = half_var_(rng_);
        double im = half_var_(rng_);
        return {re, im};
    }

    Rng &engine() { return rng_; }

private:
    Rng rng_;
    std::normal_distribution<double> half_var_{0.0, std::numbers::sqrt2 / 2.0};
};

// ---------------------------------------------------------------------------
// Parallel loop over independent indices. Each index must write only to its own
// output slot; with that contract the result is identical for any thread count.

template <typename Fn>
void parallel_for(std::size_t n, unsigned n_threads, Fn &&fn)
{
    if (n_threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, n));
    std::vector<std::exception_ptr> errors(n_threads);
    {
        std::vector<std::jthread> workers;
        workers.reserve(n_threads);
        for (unsigned w = 0; w < n_threads; ++w) {
            workers.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += n_threads)
                        fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

// Hermitian part (A + A^H) / 2.
inline CMatrix hermitian_part(const CMatrix &a)
{
    return (a + a.adjoint()) * 0.5;
}

inline bool is_hermitian(const CMatrix &a, double tol)
{
    if (a.rows() != a.cols())
        return false;
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, a.cwiseAbs().maxCoeff());
}

} // namespace raindoa
