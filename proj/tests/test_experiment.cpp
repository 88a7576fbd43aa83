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


#include "raindoa/experiment.hpp"

#include <gtest/gtest.h>

using namespace raindoa;

namespace {

ExperimentSpec small_spec(std::uint64_t seed)
{
    ExperimentSpec spec;
    spec.seed = seed;
    spec.n_trials = 40;
    spec.n_snapshots = 200;
    spec.snr_grid_db = {0.0, 30.0};
    spec.rb_trials = 20;
    return spec;
}

const RMSERecord &find(const std::vector<RMSERecord> &recs, double snr, const std::string &method)
{
    for (const auto &r : recs)
        if (r.snr_db == snr && r.method == method)
            return r;
    throw std::runtime_error("record not found");
}

} // namespace

TEST(Method, ParseAndName)
{
    for (auto e : {Estimator::music, Estimator::root_music})
        for (auto c : {Condition::calibrated, Condition::uncalibrated, Condition::no_rain}) {
            Method m{e, c};
            EXPECT_EQ(Method::parse(m.name()), m);
        }
    EXPECT_EQ(Method{}.name(), "root_music/calibrated");
    EXPECT_THROW(Method::parse("music"), ConfigError);
    EXPECT_THROW(Method::parse("esprit/calibrated"), ConfigError);
    EXPECT_THROW(Method::parse("music/dry"), ConfigError);
}

TEST(ExperimentSpec, Validation)
{
    ExperimentSpec spec;
    EXPECT_NO_THROW(spec.validate());
    spec.theta_deg = 90.0;
    EXPECT_THROW(spec.validate(), ConfigError);
    spec = ExperimentSpec{};
    spec.n_trials = 0;
    EXPECT_THROW(spec.validate(), ConfigError);
    spec = ExperimentSpec{};
    spec.methods.clear();
    EXPECT_THROW(spec.validate(), ConfigError);
    spec = ExperimentSpec{};
    spec.snr_grid_db.clear();
    EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(ExperimentSpec, NoisePowerMatchesSnr)
{
    ExperimentSpec spec;
    EXPECT_NEAR(spec.source_at(10.0).noise_power, 0.1, 1e-15);
    spec.lambda11 = 1.0;
    EXPECT_NEAR(spec.source_at(0.0).noise_power, 2.0, 1e-15);
}

TEST(RmseSweep, CleanDataIsAccurateAtHighSnr)
{
    ExperimentSpec spec = small_spec(3);
    spec.n_snapshots = 1000;
    spec.methods = {{Estimator::root_music, Condition::no_rain}, {Estimator::music, Condition::no_rain}};
    const auto recs = run_rmse_sweep(spec);
    ASSERT_EQ(recs.size(), 4u);
    const auto &rm = find(recs, 30.0, "root_music/no_rain");
    EXPECT_LT(rm.rmse_deg, 0.1);
    EXPECT_LT(rm.rmse_deg, 0.01);
    EXPECT_EQ(rm.n_valid, spec.n_trials);
    EXPECT_EQ(rm.invalid_rate, 0.0);
    EXPECT_LT(find(recs, 30.0, "music/no_rain").rmse_deg, 0.1);
    EXPECT_LT(rm.rmse_deg, find(recs, 0.0, "root_music/no_rain").rmse_deg);
}

TEST(RmseSweep, DeterministicAcrossRunsAndThreads)
{
    ExperimentSpec spec = small_spec(11);
    const auto a = run_rmse_sweep(spec);
    const auto b = run_rmse_sweep(spec);
    spec.threads = 3;
    const auto c = run_rmse_sweep(spec);
    ASSERT_EQ(a.size(), c.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].rmse_deg, b[i].rmse_deg);
        EXPECT_EQ(a[i].rmse_deg, c[i].rmse_deg);
        EXPECT_EQ(a[i].n_valid, c[i].n_valid);
    }
    spec.seed = 12;
    const auto d = run_rmse_sweep(spec);
    EXPECT_NE(a.back().rmse_deg, d.back().rmse_deg);
}

TEST(RmseSweep, RainDegradesAccuracy)
{
    ExperimentSpec spec = small_spec(5);
    const auto recs = run_rmse_sweep(spec);
    EXPECT_GT(find(recs, 30.0, "root_music/uncalibrated").rmse_deg,
              find(recs, 30.0, "root_music/no_rain").rmse_deg);
    for (const auto &r : recs) {
        EXPECT_EQ(r.seed, 5u);
        EXPECT_EQ(r.n_trials, spec.n_trials);
        EXPECT_TRUE(std::isfinite(r.rmse_deg));
    }
}

TEST(Spectrum, CleanConditionPeaksOnTruth)
{
    ExperimentSpec spec = small_spec(1);
    spec.n_snapshots = 1000;
    const SpectrumComparison s = run_spectrum_comparison(spec);
    EXPECT_NEAR(s.no_rain.peak_angles_deg.front(), 40.0, 0.2);
    EXPECT_NEAR(s.calibrated.peak_angles_deg.front(), 40.0, 1.0);
    EXPECT_EQ(s.no_rain.grid_deg.size(), s.calibrated.grid_deg.size());
}

TEST(Spectrum, CoherentDistortionMakesCalibrationANoOp)
{
    ArrayConfig arr{8, 0.5};
    const auto rb = DistortionCovariance::from_alphas(RVector::Ones(7), 0.5);
    const SpectrumComparison s = spectrum_conditions(arr, SourceConfig{40.0, 1.0, 0.0}, rb, 200, 7, angle_grid());
    ASSERT_EQ(s.uncalibrated.spectrum_db.size(), s.calibrated.spectrum_db.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < s.calibrated.spectrum_db.size(); ++i)
        worst = std::max(worst, std::abs(s.calibrated.spectrum_db[i] - s.uncalibrated.spectrum_db[i]));
    EXPECT_LT(worst, 1e-6);
    EXPECT_EQ(s.uncalibrated.peak_angles_deg.front(), s.calibrated.peak_angles_deg.front());
}

TEST(RbRecovery, AnalyticIsExact)
{
    ExperimentSpec spec;
    const auto rows = rb_recovery_analytic(spec);
    ASSERT_EQ(rows.size(), 8u);
    for (const auto &r : rows)
        EXPECT_NEAR(r.estimated_value, r.true_value, 1e-12);
    const double sigma_n2 = 0.3;
    const auto noisy = rb_recovery_analytic(spec, sigma_n2);
    EXPECT_NEAR(noisy[0].estimated_value - noisy[0].true_value, sigma_n2, 1e-12);
    for (std::size_t k = 1; k < noisy.size(); ++k)
        EXPECT_NEAR(noisy[k].estimated_value, noisy[k].true_value, 1e-12);
}

TEST(RbRecovery, StatisticalWithinTenPercent)
{
    ExperimentSpec spec = small_spec(9);
    spec.n_snapshots = 1000;
    spec.rb_trials = 50;
    const auto rows = run_rb_recovery(spec);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        EXPECT_LT(std::abs(rows[k].estimated_value - rows[k].true_value) / rows[k].true_value, 0.10) << k;
        EXPECT_GT(rows[k].stderr_value, 0.0);
    }
}

TEST(PdfStudy, ReferenceLabels)
{
    const auto alphas = reference_alphas();
    ASSERT_EQ(alphas.size(), 4u);
    const auto study = run_pdf_study(alphas, 20000, 4, {}, 2);
    ASSERT_EQ(study.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(study[i].label, alphas[i].label);
        EXPECT_EQ(study[i].stats.alpha, alphas[i].alpha);
        EXPECT_NEAR(study[i].stats.phase_diff.integral(), 1.0, 1e-9);
    }
    const auto again = run_pdf_study(alphas, 20000, 4, {}, 1);
    EXPECT_EQ(study[2].stats.phase_stddev_deg, again[2].stats.phase_stddev_deg);
}
