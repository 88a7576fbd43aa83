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

// Monte Carlo experiment drivers: RMSE against SNR, three-condition MUSIC
// spectra, distortion covariance recovery and pair-statistics densities.
//
// Every trial draws from streams derived from (master seed, snr index, trial
// index), so results are identical for any thread count.

#include "raindoa/array_sim.hpp"
#include "raindoa/distortion_model.hpp"
#include "raindoa/doa_estimators.hpp"
#include "raindoa/ht_calibration.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace raindoa {

enum class Estimator { music, root_music };
enum class Condition { calibrated, uncalibrated, no_rain };

struct Method {
    Estimator estimator = Estimator::root_music;
    Condition condition = Condition::calibrated;

    std::string name() const
    {
        std::string s = estimator == Estimator::music ? "music" : "root_music";
        switch (condition) {
        case Condition::calibrated: return s + "/calibrated";
        case Condition::uncalibrated: return s + "/uncalibrated";
        case Condition::no_rain: return s + "/no_rain";
        }
        return s;
    }

    static Method parse(std::string_view text)
    {
        auto slash = text.find('/');
        if (slash == std::string_view::npos)
            throw ConfigError("method must look like <estimator>/<condition>: " + std::string(text));
        Method m;
        auto est = text.substr(0, slash);
        auto cond = text.substr(slash + 1);
        if (est == "music")
            m.estimator = Estimator::music;
        else if (est == "root_music")
            m.estimator = Estimator::root_music;
        else
            throw ConfigError("unknown estimator: " + std::string(est));
        if (cond == "calibrated")
            m.condition = Condition::calibrated;
        else if (cond == "uncalibrated")
            m.condition = Condition::uncalibrated;
        else if (cond == "no_rain")
            m.condition = Condition::no_rain;
        else
            throw ConfigError("unknown condition: " + std::string(cond));
        return m;
    }

    bool operator==(const Method &) const = default;
};

inline std::vector<Method> default_methods()
{
    return {{Estimator::root_music, Condition::no_rain},
            {Estimator::root_music, Condition::uncalibrated},
            {Estimator::root_music, Condition::calibrated}};
}

struct ExperimentSpec {
    RainScenario scenario = reference_scenario();
    ArrayConfig array;
    double theta_deg = 40.0;
    double signal_power = 1.0;
    double lambda11 = 0.5;
    std::vector<double> snr_grid_db{-10.0, 0.0, 10.0, 20.0, 30.0};
    int n_trials = 500;
    std::size_t n_snapshots = 1000;
    std::uint64_t seed = 0;
    std::vector<Method> methods = default_methods();
    bool clamp_invalid = false; // count unmappable roots as +-90 deg instead of excluding them
    double grid_step_deg = 0.1;
    double spectrum_snr_db = 20.0;
    double rb_snr_db = 20.0;
    int rb_trials = 100;
    unsigned threads = 1;

    void validate() const
    {
        try {
            scenario.validate();
            array.validate();
        } catch (const DomainError &e) {
            throw ConfigError(e.what());
        }
        if (!(std::abs(theta_deg) < 90.0))
            throw ConfigError("theta must lie in (-90, 90) degrees");
        if (!(signal_power > 0.0) || !(lambda11 > 0.0))
            throw ConfigError("signal power and lambda11 must be positive");
        if (n_trials < 1 || rb_trials < 1)
            throw ConfigError("trial counts must be at least 1");
        if (snr_grid_db.empty())
            throw ConfigError("snr grid must not be empty");
        if (n_snapshots < 1)
            throw ConfigError("need at least one snapshot per trial");
        if (methods.empty())
            throw ConfigError("no methods selected");
    }

    SourceConfig source_at(double snr_db) const
    {
        return {theta_deg, signal_power, noise_power_for_snr(snr_db, signal_power, 2.0 * lambda11)};
    }

    DistortionCovariance distortion() const { return build_distortion_covariance(scenario, array, lambda11).cov; }
};

struct RMSERecord {
    double snr_db = 0.0;
    std::string method;
    double rmse_deg = 0.0; // NaN when no trial produced a valid estimate
    double invalid_rate = 0.0;
    int n_trials = 0;
    int n_valid = 0;  // trials with a mappable estimate
    int n_failed = 0; // trials that raised an error (also counted as invalid)
    std::uint64_t seed = 0;
};

inline constexpr std::uint64_t kStreamRain = 1;
inline constexpr std::uint64_t kStreamClean = 2;

namespace detail {

inline DoaEstimate estimate(Estimator est, const CMatrix &r, double spacing, const std::vector<double> &grid)
{
    if (est == Estimator::music)
        return music_estimate(r, spacing, grid);
    return root_music(r, 1, spacing).estimates.front();
}

struct TrialOutcome {
    double sq_error = 0.0;
    bool counted = false; // contributes to the RMSE
    bool invalid = false; // unmappable root
    bool failed = false;
};

} // namespace detail

/// RMSE in degrees per (SNR, method) over valid trials, with the invalid rate.
inline std::vector<RMSERecord> run_rmse_sweep(const ExperimentSpec &spec)
{
    spec.validate();
    const DistortionCovariance rb = spec.distortion();
    const std::vector<double> grid = angle_grid(spec.grid_step_deg);
    const std::size_t n_snr = spec.snr_grid_db.size();
    const auto n_trials = static_cast<std::size_t>(spec.n_trials);
    const std::size_t n_methods = spec.methods.size();

    bool need_rain = false, need_clean = false;
    for (const auto &m : spec.methods)
        (m.condition == Condition::no_rain ? need_clean : need_rain) = true;

    // outcomes[(snr * n_trials + trial) * n_methods + method]
    std::vector<detail::TrialOutcome> outcomes(n_snr * n_trials * n_methods);
    parallel_for(n_snr * n_trials, spec.threads, [&](std::size_t unit) {
        const std::size_t s = unit / n_trials, t = unit % n_trials;
        const std::uint64_t trial_seed = derive_seed(spec.seed, s, t);
        const SourceConfig src = spec.source_at(spec.snr_grid_db[s]);
        CMatrix r_rain, r_clean;
        CMatrix rx_cal;
        bool setup_failed = false;
        try {
            if (need_rain)
                r_rain = sample_covariance(synthesize_snapshots(spec.array, src, &rb, spec.n_snapshots,
                                                                derive_seed(trial_seed, kStreamRain)));
            if (need_clean)
                r_clean = sample_covariance(synthesize_snapshots(spec.array, src, nullptr, spec.n_snapshots,
                                                                 derive_seed(trial_seed, kStreamClean)));
        } catch (const std::exception &) {
            setup_failed = true;
        }
        for (std::size_t k = 0; k < n_methods; ++k) {
            auto &out = outcomes[unit * n_methods + k];
            if (setup_failed) {
                out.failed = true;
                continue;
            }
            const Method &m = spec.methods[k];
            try {
                const CMatrix *r = &r_rain;
                if (m.condition == Condition::no_rain) {
                    r = &r_clean;
                } else if (m.condition == Condition::calibrated) {
                    if (rx_cal.size() == 0)
                        rx_cal = calibrate(r_rain).rx_hat;
                    r = &rx_cal;
                }
                DoaEstimate e = detail::estimate(m.estimator, *r, spec.array.spacing, grid);
                out.invalid = !e.valid;
                if (e.valid || spec.clamp_invalid) {
                    const double err = e.theta_deg - spec.theta_deg;
                    out.sq_error = err * err;
                    out.counted = true;
                }
            } catch (const std::exception &) {
                out.failed = true;
            }
        }
    });

    std::vector<RMSERecord> records;
    for (std::size_t s = 0; s < n_snr; ++s) {
        for (std::size_t k = 0; k < n_methods; ++k) {
            RMSERecord rec;
            rec.snr_db = spec.snr_grid_db[s];
            rec.method = spec.methods[k].name();
            rec.n_trials = spec.n_trials;
            rec.seed = spec.seed;
            double sum = 0.0;
            int n_counted = 0, n_invalid = 0;
            for (std::size_t t = 0; t < n_trials; ++t) {
                const auto &o = outcomes[((s * n_trials) + t) * n_methods + k];
                rec.n_failed += o.failed;
                n_invalid += o.invalid || o.failed;
                if (o.counted) {
                    ++n_counted;
                    sum += o.sq_error;
                }
            }
            rec.n_valid = rec.n_trials - n_invalid;
            rec.invalid_rate = static_cast<double>(n_invalid) / rec.n_trials;
            rec.rmse_deg = n_counted ? std::sqrt(sum / n_counted) : std::numeric_limits<double>::quiet_NaN();
            records.push_back(rec);
        }
    }
    return records;
}

// ---------------------------------------------------------------------------

struct SpectrumComparison {
    SpectrumResult no_rain;
    SpectrumResult uncalibrated;
    SpectrumResult calibrated;
};

/// MUSIC spectra for (a) clean data, (b) distorted data and (c) distorted data
/// after calibration. (b) and (c) share one synthesis.
inline SpectrumComparison spectrum_conditions(const ArrayConfig &array, const SourceConfig &source,
                                              const DistortionCovariance &rb, std::size_t n_snapshots,
                                              std::uint64_t seed, const std::vector<double> &grid)
{
    SpectrumComparison out;
    const CMatrix r_clean =
        sample_covariance(synthesize_snapshots(array, source, nullptr, n_snapshots, derive_seed(seed, kStreamClean)));
    const CMatrix r_rain =
        sample_covariance(synthesize_snapshots(array, source, &rb, n_snapshots, derive_seed(seed, kStreamRain)));
    out.no_rain = music_spectrum(r_clean, 1, array.spacing, grid);
    out.uncalibrated = music_spectrum(r_rain, 1, array.spacing, grid);
    out.calibrated = music_spectrum(calibrate(r_rain).rx_hat, 1, array.spacing, grid);
    return out;
}

inline SpectrumComparison run_spectrum_comparison(const ExperimentSpec &spec)
{
    spec.validate();
    return spectrum_conditions(spec.array, spec.source_at(spec.spectrum_snr_db), spec.distortion(),
                               spec.n_snapshots, spec.seed, angle_grid(spec.grid_step_deg));
}

// ---------------------------------------------------------------------------

struct RbRecoveryRow {
    int lag = 0;
    double true_value = 0.0;      // sigma_s^2 [R_b]_lag; excludes noise at lag 0
    double estimated_value = 0.0; // mean over trials of rb_hat(0, lag)
    double stderr_value = 0.0;
};

/// Mean first row of the estimated distortion magnitude over `rb_trials` trials at
/// `rb_snr_db`. The lag-0 estimate carries the noise power on top of the true value.
inline std::vector<RbRecoveryRow> run_rb_recovery(const ExperimentSpec &spec)
{
    spec.validate();
    const DistortionCovariance rb = spec.distortion();
    const SourceConfig src = spec.source_at(spec.rb_snr_db);
    const int m = spec.array.n_elements;
    const auto n = static_cast<std::size_t>(spec.rb_trials);
    RMatrix rows(static_cast<Eigen::Index>(n), m);
    parallel_for(n, spec.threads, [&](std::size_t t) {
        const CMatrix r = sample_covariance(synthesize_snapshots(
            spec.array, src, &rb, spec.n_snapshots, derive_seed(derive_seed(spec.seed, 0xB0B, t), kStreamRain)));
        rows.row(static_cast<Eigen::Index>(t)) = calibrate(r).rb_hat.row(0);
    });
    std::vector<RbRecoveryRow> out;
    for (int k = 0; k < m; ++k) {
        const RVector col = rows.col(k);
        const double mean = col.mean();
        const double var = n > 1 ? (col.array() - mean).square().sum() / static_cast<double>(n - 1) : 0.0;
        out.push_back({k, spec.signal_power * rb.first_row(k), mean, std::sqrt(var / static_cast<double>(n))});
    }
    return out;
}

/// Infinite-snapshot variant: calibrates the analytic covariance once.
inline std::vector<RbRecoveryRow> rb_recovery_analytic(const ExperimentSpec &spec, double noise_power = 0.0)
{
    spec.validate();
    const DistortionCovariance rb = spec.distortion();
    const SourceConfig src{spec.theta_deg, spec.signal_power, noise_power};
    const CalibrationOutput cal = calibrate(analytic_covariance(spec.array, src, &rb));
    std::vector<RbRecoveryRow> out;
    for (int k = 0; k < spec.array.n_elements; ++k)
        out.push_back({k, spec.signal_power * rb.first_row(k), cal.rb_hat(0, k), 0.0});
    return out;
}

// ---------------------------------------------------------------------------

struct LabelledAlpha {
    std::string label;
    double alpha;
};

inline std::vector<LabelledAlpha> reference_alphas()
{
    std::vector<LabelledAlpha> out;
    for (const auto &c : kReferenceCases)
        out.push_back({c.label, c.alpha});
    return out;
}

struct PdfStudyEntry {
    std::string label;
    FieldPairStats stats;
};

inline std::vector<PdfStudyEntry> run_pdf_study(const std::vector<LabelledAlpha> &alphas, std::size_t n_samples,
                                                std::uint64_t seed, const PairPdfOptions &opt = {},
                                                unsigned threads = 1)
{
    std::vector<PdfStudyEntry> out(alphas.size());
    parallel_for(alphas.size(), threads, [&](std::size_t i) {
        out[i] = {alphas[i].label, empirical_pair_pdfs(alphas[i].alpha, n_samples, derive_seed(seed, 0x9DF, i), opt)};
    });
    return out;
}

} // namespace raindoa
