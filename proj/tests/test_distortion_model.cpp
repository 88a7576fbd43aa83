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


#include "oracles.hpp"
#include "raindoa/array_sim.hpp"
#include "raindoa/distortion_model.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace raindoa;

namespace {

RainScenario fifty_mm_scenario()
{
    RainScenario s;
    s.rain_rate_mm_hr = 50.0;
    s.range_m = 200.0;
    s.coeffs = reference_coeffs(50.0, true).coeffs;
    return s;
}

std::vector<AlphaObservation> reference_obs_25()
{
    return {{200.0, 4.0, 0.6470}, {400.0, 4.0, 0.6217}, {200.0, 8.0, 0.5598}};
}

} // namespace

TEST(AlphaModel, ZeroRangeGivesUnitAlpha)
{
    AlphaCoeffs c{0.3, 0.01, 0.2};
    for (double u : {0.1, 1.0, 4.0, 8.0})
        EXPECT_DOUBLE_EQ(alpha_model(c, 0.0, u), 1.0);
}

TEST(AlphaModel, StrictlyDecreasingInRangeAndSeparation)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> a1(1e-3, 0.1), a2(0.0, 0.05), a3(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        AlphaCoeffs c{a1(rng), a2(rng), a3(rng)};
        for (double u = 0.1; u <= 8.0; u += 0.7) {
            double prev = 1.0;
            for (double r = 10.0; r <= 500.0; r += 10.0) {
                double v = alpha_model(c, r, u);
                EXPECT_LT(v, prev);
                EXPECT_GT(v, 0.0);
                prev = v;
            }
        }
        for (double r = 10.0; r <= 500.0; r += 45.0) {
            double prev = 1.0;
            for (double u = 0.1; u <= 8.0; u += 0.1) {
                double v = alpha_model(c, r, u);
                EXPECT_LT(v, prev);
                prev = v;
            }
        }
    }
}

TEST(AlphaEmpirical, DomainErrorsAndValidityFlag)
{
    RainScenario s = fifty_mm_scenario();
    EXPECT_THROW(alpha_empirical(s, 0.0), DomainError);
    EXPECT_THROW(alpha_empirical(s, -1.0), DomainError);
    RainScenario bad = s;
    bad.range_m = 0.0;
    EXPECT_THROW(alpha_empirical(bad, 0.01), DomainError);

    EXPECT_FALSE(alpha_empirical(s, 4.0 * s.wavelength_m).outside_validity);
    EXPECT_TRUE(alpha_empirical(s, 10.0 * s.wavelength_m).outside_validity);
    EXPECT_TRUE(alpha_empirical(s, 0.05 * s.wavelength_m).outside_validity);
    RainScenario far = s;
    far.range_m = 600.0;
    AlphaValue v = alpha_empirical(far, 4.0 * s.wavelength_m);
    EXPECT_TRUE(v.outside_validity);
    EXPECT_GT(v.value, 0.0);
    EXPECT_LE(v.value, 1.0);
}

TEST(FitAlphaCoeffs, ReferenceCasesMatchClosedFormOracle)
{
    AlphaFit fit = fit_alpha_coeffs(reference_obs_25());
    AlphaCoeffs ref = oracle::three_point_alpha_coeffs(200.0, 400.0, 4.0, 8.0, 0.6470, 0.6217, 0.5598);
    EXPECT_NEAR(fit.coeffs.a1, ref.a1, 1e-6 * ref.a1);
    EXPECT_NEAR(fit.coeffs.a2, ref.a2, 1e-6 * ref.a2);
    EXPECT_NEAR(fit.coeffs.a3, ref.a3, 1e-6 * ref.a3);
    EXPECT_LT(fit.residual, 1e-8);

    // substitution
    EXPECT_NEAR(alpha_model(fit.coeffs, 200.0, 4.0), 0.6470, 1e-6);
    EXPECT_NEAR(alpha_model(fit.coeffs, 400.0, 4.0), 0.6217, 1e-6);
    EXPECT_NEAR(alpha_model(fit.coeffs, 200.0, 8.0), 0.5598, 1e-6);
}

TEST(FitAlphaCoeffs, WiderSeparationDecorrelatesMore)
{
    AlphaFit fit = fit_alpha_coeffs(reference_obs_25());
    RainScenario s;
    s.coeffs = fit.coeffs;
    const double at4 = alpha_empirical(s, 4.0 * s.wavelength_m).value;
    const double at8 = alpha_empirical(s, 8.0 * s.wavelength_m).value;
    EXPECT_NEAR(at4, 0.6470, 1e-6);
    EXPECT_NEAR(at8, 0.5598, 1e-6);
    EXPECT_LT(at8, at4);
}

TEST(FitAlphaCoeffs, RecoversSyntheticTriple)
{
    const AlphaCoeffs truth{1.0, 0.01, 0.1};
    std::vector<AlphaObservation> obs;
    for (double r : {0.5, 1.0, 2.0})
        for (double u : {0.2, 1.0, 3.0})
            obs.push_back({r, u, alpha_model(truth, r, u)});
    AlphaFit fit = fit_alpha_coeffs(obs);
    EXPECT_NEAR(fit.coeffs.a1, truth.a1, 1e-6 * truth.a1);
    EXPECT_NEAR(fit.coeffs.a2, truth.a2, 1e-6 * truth.a2);
    EXPECT_NEAR(fit.coeffs.a3, truth.a3, 1e-6 * truth.a3);

    std::vector<AlphaObservation> three{obs[0], obs[1], obs[3]};
    AlphaFit exact = fit_alpha_coeffs(three);
    EXPECT_LT(exact.residual, 1e-8);
    EXPECT_NEAR(exact.coeffs.a2, truth.a2, 1e-6 * truth.a2);
}

TEST(FitAlphaCoeffs, OverdeterminedNoisyDataImprovesOnTruth)
{
    const AlphaCoeffs truth{0.01, 0.02, 0.3};
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<AlphaObservation> obs;
    for (double r : {50.0, 150.0, 300.0, 450.0})
        for (double u : {0.5, 2.0, 5.0})
            obs.push_back({r, u, alpha_model(truth, r, u) * std::exp(noise(rng))});
    AlphaFit fit = fit_alpha_coeffs(obs);
    EXPECT_LE(fit.residual, detail::log_residual(truth, obs) + 1e-12);
    EXPECT_GT(fit.coeffs.a1, 0.0);
}

TEST(FitAlphaCoeffs, DegenerateInputs)
{
    auto obs = reference_obs_25();
    EXPECT_THROW(fit_alpha_coeffs({obs[0], obs[1]}), FitError);
    EXPECT_THROW(fit_alpha_coeffs({{200, 4, 0.6}, {200, 5, 0.55}, {200, 6, 0.5}}), FitError);
    EXPECT_THROW(fit_alpha_coeffs({{100, 4, 0.7}, {200, 4, 0.6}, {300, 4, 0.5}}), FitError);
    EXPECT_THROW(fit_alpha_coeffs({obs[0], obs[1], obs[0]}), FitError);
    EXPECT_THROW(fit_alpha_coeffs({obs[0], obs[1], {200, 8, 1.0}}), FitError);
}

TEST(FitAlphaCoeffs, FiftyMillimetreCaseReproducedWithSharedShape)
{
    AlphaFit f25 = reference_coeffs(25.0, false);
    AlphaFit f50 = reference_coeffs(50.0, true);
    EXPECT_DOUBLE_EQ(f50.coeffs.a2, f25.coeffs.a2);
    EXPECT_DOUBLE_EQ(f50.coeffs.a3, f25.coeffs.a3);
    EXPECT_NEAR(alpha_model(f50.coeffs, 200.0, 4.0), 0.4994, 1e-10);
    EXPECT_THROW(reference_coeffs(50.0, false), ConfigError);
    EXPECT_THROW(reference_coeffs(12.5, true), ConfigError);
}

TEST(DistortionCovariance, TwoElementMatrix)
{
    RainScenario s = fifty_mm_scenario();
    ArrayConfig a{2, 0.5, s.wavelength_m};
    auto built = build_distortion_covariance(s, a, 0.5);
    const double alpha = alpha_model(s.coeffs, s.range_m, 0.5);
    RMatrix expect(2, 2);
    expect << 1.0, alpha, alpha, 1.0;
    EXPECT_LT((built.cov.matrix() - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DistortionCovariance, FullyCorrelatedLimitIsRankOne)
{
    DistortionCovariance cov = DistortionCovariance::from_alphas(RVector::Ones(5), 0.5);
    EXPECT_TRUE(cov.matrix().isApprox(RMatrix::Ones(6, 6)));
    Eigen::SelfAdjointEigenSolver<RMatrix> es(cov.matrix());
    EXPECT_NEAR(es.eigenvalues()(5), 6.0, 1e-12);
    EXPECT_LT(es.eigenvalues().head(5).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NO_THROW(cov.check_invariants());
}

TEST(DistortionCovariance, HeavyRainRowStrictlyDecreasing)
{
    RainScenario s = fifty_mm_scenario();
    ArrayConfig a{8, 0.5, s.wavelength_m};
    auto built = build_distortion_covariance(s, a);
    EXPECT_FALSE(built.outside_validity);
    const RVector &row = built.cov.first_row;
    EXPECT_DOUBLE_EQ(row(0), 1.0);
    for (int k = 1; k < 8; ++k) {
        EXPECT_GT(row(k), 0.0);
        EXPECT_LT(row(k), row(k - 1));
        EXPECT_NEAR(row(k), alpha_model(s.coeffs, 200.0, 0.5 * k), 1e-15);
    }
    EXPECT_NO_THROW(built.cov.check_invariants());
}

TEST(DistortionCovariance, InvariantsHoldForReferenceCases)
{
    for (const auto &rc : kReferenceCases) {
        RainScenario s;
        s.rain_rate_mm_hr = rc.rain_rate_mm_hr;
        s.range_m = rc.range_m;
        s.coeffs = reference_coeffs(rc.rain_rate_mm_hr, true).coeffs;
        for (int m : {2, 8, 17}) {
            ArrayConfig a{m, 0.5, s.wavelength_m};
            auto built = build_distortion_covariance(s, a, 0.7);
            EXPECT_NO_THROW(built.cov.check_invariants()) << rc.label << " M=" << m;
            EXPECT_DOUBLE_EQ(built.cov.first_row(0), 1.4);
        }
    }
    ArrayConfig wide{20, 0.5, 0.0039};
    EXPECT_TRUE(build_distortion_covariance(fifty_mm_scenario(), wide).outside_validity);
}

TEST(DistortionCovariance, InvariantViolationsDetected)
{
    DistortionCovariance not_psd;
    not_psd.lambda11 = 0.5;
    not_psd.first_row = (RVector(3) << 1.0, 1.0, 0.0).finished();
    EXPECT_THROW(not_psd.check_invariants(), DomainError);

    DistortionCovariance bad_diag;
    bad_diag.lambda11 = 0.5;
    bad_diag.first_row = (RVector(2) << 2.0, 0.5).finished();
    EXPECT_THROW(bad_diag.check_invariants(), DomainError);

    DistortionCovariance too_big;
    too_big.lambda11 = 0.5;
    too_big.first_row = (RVector(2) << 1.0, 1.5).finished();
    EXPECT_THROW(too_big.check_invariants(), DomainError);
}

TEST(SampleDistortion, IdentityCovarianceConverges)
{
    DistortionCovariance cov = DistortionCovariance::from_alphas(RVector::Zero(7), 0.5);
    CMatrix b = sample_distortion(cov, 1000000, 42);
    CMatrix r = (b * b.adjoint()) / static_cast<double>(b.cols());
    EXPECT_LT(oracle::frobenius_relative(r, CMatrix::Identity(8, 8)), 0.02);
}

TEST(SampleDistortion, ScalarMoments)
{
    DistortionCovariance cov;
    cov.lambda11 = 0.5;
    cov.first_row = RVector::Ones(1);
    CMatrix b = sample_distortion(cov, 1000000, 7);
    const double n = static_cast<double>(b.cols());
    const double power = b.cwiseAbs2().sum() / n;
    const cdouble pseudo = b.array().square().sum() / n;
    EXPECT_NEAR(power, 1.0, 0.01);
    EXPECT_LT(std::abs(pseudo), 0.01);
}

TEST(SampleDistortion, FullyCorrelatedColumnsAreConstant)
{
    DistortionCovariance cov = DistortionCovariance::from_alphas(RVector::Ones(7), 0.5);
    CMatrix b = sample_distortion(cov, 2000, 3);
    for (Eigen::Index t = 0; t < b.cols(); ++t)
        for (Eigen::Index i = 1; i < b.rows(); ++i)
            ASSERT_LT(std::abs(b(i, t) - b(0, t)), 1e-12 * std::max(1.0, std::abs(b(0, t))));
}

TEST(SampleDistortion, HeavyRainCovarianceConverges)
{
    RainScenario s = fifty_mm_scenario();
    auto cov = build_distortion_covariance(s, ArrayConfig{8, 0.5, s.wavelength_m}).cov;
    CMatrix b = sample_distortion(cov, 1000000, 2026);
    CMatrix r = (b * b.adjoint()) / static_cast<double>(b.cols());
    EXPECT_LT(oracle::frobenius_relative(r, cov.matrix().cast<cdouble>()), 0.02);
}

TEST(SampleDistortion, DeterministicAcrossThreadCounts)
{
    RainScenario s = fifty_mm_scenario();
    auto cov = build_distortion_covariance(s, ArrayConfig{8, 0.5, s.wavelength_m}).cov;
    CMatrix one = sample_distortion(cov, 5000, 9, 1);
    CMatrix four = sample_distortion(cov, 5000, 9, 4);
    CMatrix again = sample_distortion(cov, 5000, 9, 1);
    EXPECT_TRUE((one.array() == four.array()).all());
    EXPECT_TRUE((one.array() == again.array()).all());
    EXPECT_FALSE((one.array() == sample_distortion(cov, 5000, 10).array()).all());
}

TEST(SampleDistortion, RejectsIndefiniteCovariance)
{
    DistortionCovariance cov;
    cov.lambda11 = 0.5;
    cov.first_row = (RVector(3) << 1.0, 1.0, 0.0).finished();
    EXPECT_THROW(sample_distortion(cov, 10, 1), DecompositionError);
    EXPECT_THROW(sample_distortion(DistortionCovariance::from_alphas(RVector::Zero(1), 0.5), 0, 1), DomainError);
}

TEST(PairPdfs, HigherCorrelationConcentratesPhaseAtZero)
{
    auto strong = empirical_pair_pdfs(0.6470, 1000000, 1);
    auto weak = empirical_pair_pdfs(0.4994, 1000000, 1);
    const std::size_t centre = 90; // bin centred on 0 deg with 181 bins
    EXPECT_NEAR(strong.phase_diff.bin_centers[centre], 0.0, 1e-12);
    EXPECT_GT(strong.phase_diff.density[centre], weak.phase_diff.density[centre]);
    EXPECT_LT(strong.phase_stddev_deg, weak.phase_stddev_deg);
}

TEST(PairPdfs, PhaseHistogramSymmetric)
{
    std::vector<std::vector<std::size_t>> hists;
    for (double alpha : {0.6470, 0.6217, 0.5598, 0.4994}) {
        auto st = empirical_pair_pdfs(alpha, 1000000, 77);
        const std::size_t n = st.phase_diff.counts.size();
        for (std::size_t i = 0; i < n / 2; ++i)
            EXPECT_NEAR(st.phase_diff.bin_centers[i], -st.phase_diff.bin_centers[n - 1 - i], 1e-9);
        hists.push_back(st.phase_diff.counts);
    }
    const auto sym = oracle::mirror_symmetry(hists);
    EXPECT_EQ(sym.pairs, 360);
    EXPECT_LE(sym.over_three, sym.allowed_over);
    EXPECT_LE(sym.max_z, sym.max_z_allowed);
}

TEST(PairPdfs, SymmetryCheckFlagsSkew)
{
    std::vector<std::size_t> skewed(181, 10000);
    for (std::size_t i = 0; i < 90; ++i)
        skewed[i] += 1000;
    EXPECT_FALSE(oracle::mirror_symmetry({skewed}).pass());
    EXPECT_TRUE(oracle::mirror_symmetry({std::vector<std::size_t>(181, 10000)}).pass());
}

TEST(PairPdfs, NearZeroCorrelationIsUniform)
{
    auto st = empirical_pair_pdfs(1e-9, 1000000, 5);
    const auto &c = st.phase_diff.counts;
    const double expected = static_cast<double>(st.n_samples) / c.size();
    double chi2 = 0.0;
    for (auto k : c)
        chi2 += (k - expected) * (k - expected) / expected;
    // 180 degrees of freedom: mean 180, sd 19
    EXPECT_LT(chi2, 180.0 + 5.0 * 19.0);
}

TEST(PairPdfs, NormalisedAndCentred)
{
    auto st = empirical_pair_pdfs(0.5598, 200000, 13);
    EXPECT_NEAR(st.phase_diff.integral(), 1.0, 1e-6);
    EXPECT_NEAR(st.magnitude_ratio.integral(), 1.0, 1e-6);
    const double n = static_cast<double>(st.n_samples);
    EXPECT_LT(std::abs(st.phase_mean_deg), 3.0 * st.phase_stddev_deg / std::sqrt(n));
    EXPECT_LT(std::abs(st.log_ratio_mean), 3.0 * st.log_ratio_stddev / std::sqrt(n));
    EXPECT_EQ(st.phase_diff.bin_centers.size(), 181u);
    EXPECT_EQ(st.magnitude_ratio.bin_centers.size(), 200u);
    EXPECT_NEAR(st.magnitude_ratio.bin_centers.back(), 5.0 - 0.0125, 1e-12);
}

TEST(PairPdfs, RejectsBadArguments)
{
    EXPECT_THROW(empirical_pair_pdfs(1.0, 100000, 1), DomainError);
    EXPECT_THROW(empirical_pair_pdfs(0.0, 100000, 1), DomainError);
    EXPECT_THROW(empirical_pair_pdfs(0.5, 100, 1), DomainError);
}
