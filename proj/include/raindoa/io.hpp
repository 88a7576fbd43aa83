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

// File formats: JSON scenario/experiment configs, CSV exports (covariance,
// spectrum, histogram, RMSE, Rb recovery), binary snapshot sets and JSON
// estimate records. CSV files may start with '#' comment lines carrying the
// generating configuration.

#include "raindoa/experiment.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace raindoa {

inline constexpr const char *kVersion = "0.1.0";

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Config

namespace detail {

template <typename T>
T get_or(const json &j, const char *key, T fallback)
{
    if (!j.contains(key))
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception &e) {
        throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
    }
}

} // namespace detail

/// Reads a rain scenario from a JSON object with keys rain_rate_mm_hr, range_m,
/// a1, a2, a3 and wavelength_m. When the coefficients are absent they come from
/// reference_coeffs(), which needs "share_shape": true for rates other than 25 mm/hr.
inline RainScenario scenario_from_json(const json &j)
{
    RainScenario s;
    s.rain_rate_mm_hr = detail::get_or(j, "rain_rate_mm_hr", s.rain_rate_mm_hr);
    s.range_m = detail::get_or(j, "range_m", s.range_m);
    s.wavelength_m = detail::get_or(j, "wavelength_m", s.wavelength_m);
    const bool has_a1 = j.contains("a1"), has_a2 = j.contains("a2"), has_a3 = j.contains("a3");
    if (has_a1 && has_a2 && has_a3) {
        s.coeffs = {j.at("a1").get<double>(), j.at("a2").get<double>(), j.at("a3").get<double>()};
    } else if (has_a1 || has_a2 || has_a3) {
        throw ConfigError("scenario: give all of a1, a2, a3 or none");
    } else {
        s.coeffs = reference_coeffs(s.rain_rate_mm_hr, detail::get_or(j, "share_shape", false)).coeffs;
    }
    try {
        s.validate();
    } catch (const DomainError &e) {
        throw ConfigError(e.what());
    }
    return s;
}

inline json to_json(const RainScenario &s)
{
    return json{{"rain_rate_mm_hr", s.rain_rate_mm_hr}, {"range_m", s.range_m}, {"a1", s.coeffs.a1},
                {"a2", s.coeffs.a2}, {"a3", s.coeffs.a3}, {"wavelength_m", s.wavelength_m}};
}

inline json to_json(const ArrayConfig &a)
{
    return json{{"n_elements", a.n_elements}, {"spacing", a.spacing}, {"wavelength_m", a.wavelength_m}};
}

/// Experiment config. The scenario is read from "scenario" if present, else
/// from the top-level keys; with no scenario keys at all it stays at
/// reference_scenario(). The array wavelength follows the scenario.
inline ExperimentSpec experiment_from_json(const json &j)
{
    using detail::get_or;
    ExperimentSpec spec;
    const json &sj = j.contains("scenario") ? j.at("scenario") : j;
    bool has_scenario = false;
    for (const char *key : {"rain_rate_mm_hr", "range_m", "a1", "a2", "a3", "wavelength_m"})
        has_scenario = has_scenario || sj.contains(key);
    if (has_scenario)
        spec.scenario = scenario_from_json(sj);
    if (j.contains("array")) {
        const json &a = j.at("array");
        spec.array.n_elements = get_or(a, "n_elements", spec.array.n_elements);
        spec.array.spacing = get_or(a, "spacing", spec.array.spacing);
    }
    spec.array.wavelength_m = spec.scenario.wavelength_m;
    if (j.contains("source")) {
        const json &s = j.at("source");
        spec.theta_deg = get_or(s, "theta_deg", spec.theta_deg);
        spec.signal_power = get_or(s, "signal_power", spec.signal_power);
    }
    spec.lambda11 = get_or(j, "lambda11", spec.lambda11);
    spec.snr_grid_db = get_or(j, "snr_grid_db", spec.snr_grid_db);
    spec.n_trials = get_or(j, "n_trials", spec.n_trials);
    spec.n_snapshots = get_or(j, "n_snapshots", spec.n_snapshots);
    spec.seed = get_or(j, "seed", spec.seed);
    if (j.contains("methods")) {
        spec.methods.clear();
        for (const auto &m : j.at("methods"))
            spec.methods.push_back(Method::parse(m.get<std::string>()));
    }
    spec.clamp_invalid = get_or(j, "clamp_invalid", spec.clamp_invalid);
    spec.grid_step_deg = get_or(j, "grid_step_deg", spec.grid_step_deg);
    spec.spectrum_snr_db = get_or(j, "spectrum_snr_db", spec.spectrum_snr_db);
    spec.rb_snr_db = get_or(j, "rb_snr_db", spec.rb_snr_db);
    spec.rb_trials = get_or(j, "rb_trials", spec.rb_trials);
    try {
        spec.validate();
    } catch (const DomainError &e) {
        throw ConfigError(e.what());
    }
    return spec;
}

inline json to_json(const ExperimentSpec &spec)
{
    json methods = json::array();
    for (const auto &m : spec.methods)
        methods.push_back(m.name());
    return json{{"scenario", to_json(spec.scenario)},
                {"array", to_json(spec.array)},
                {"source", {{"theta_deg", spec.theta_deg}, {"signal_power", spec.signal_power}}},
                {"lambda11", spec.lambda11},
                {"snr_grid_db", spec.snr_grid_db},
                {"n_trials", spec.n_trials},
                {"n_snapshots", spec.n_snapshots},
                {"seed", spec.seed},
                {"methods", methods},
                {"clamp_invalid", spec.clamp_invalid},
                {"grid_step_deg", spec.grid_step_deg},
                {"spectrum_snr_db", spec.spectrum_snr_db},
                {"rb_snr_db", spec.rb_snr_db},
                {"rb_trials", spec.rb_trials},
                {"version", kVersion}};
}

inline json load_json_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path);
    try {
        return json::parse(in, nullptr, true, true);
    } catch (const json::parse_error &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// CSV helpers

inline std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// One '#' line holding the configuration as compact JSON.
inline std::string header_comment(const json &meta) { return "# " + meta.dump() + "\n"; }

inline std::ofstream open_out(const std::string &path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path);
    return out;
}

/// Covariance as CSV: each row holds M "re,im" pairs, i.e. 2M numeric columns.
inline void write_covariance_csv(const std::string &path, const CMatrix &r, const json &meta = {})
{
    auto out = open_out(path);
    if (!meta.is_null())
        out << header_comment(meta);
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
        for (Eigen::Index j = 0; j < r.cols(); ++j) {
            if (j)
                out << ',';
            out << format_double(r(i, j).real()) << ',' << format_double(r(i, j).imag());
        }
        out << '\n';
    }
}

inline void write_real_matrix_csv(const std::string &path, const RMatrix &r, const json &meta = {})
{
    auto out = open_out(path);
    if (!meta.is_null())
        out << header_comment(meta);
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
        for (Eigen::Index j = 0; j < r.cols(); ++j)
            out << (j ? "," : "") << format_double(r(i, j));
        out << '\n';
    }
}

inline CMatrix read_covariance_csv(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        std::vector<double> vals;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                vals.push_back(std::stod(cell, &used));
            } catch (const std::exception &) {
                throw IoError(path + ": non-numeric cell '" + cell + "'");
            }
        }
        rows.push_back(std::move(vals));
    }
    const auto m = static_cast<Eigen::Index>(rows.size());
    if (m == 0)
        throw IoError(path + ": no data rows");
    CMatrix r(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto &v = rows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(v.size()) != 2 * m)
            throw DomainError(path + ": covariance must be square (each row needs 2M values)");
        for (Eigen::Index j = 0; j < m; ++j)
            r(i, j) = {v[static_cast<std::size_t>(2 * j)], v[static_cast<std::size_t>(2 * j + 1)]};
    }
    return r;
}

inline void write_spectrum_csv(const std::string &path, const SpectrumResult &s, const json &meta = {})
{
    auto out = open_out(path);
    if (!meta.is_null())
        out << header_comment(meta);
    out << "angle_deg,pseudo_spectrum_db\n";
    for (std::size_t i = 0; i < s.grid_deg.size(); ++i)
        out << format_double(s.grid_deg[i]) << ',' << format_double(s.spectrum_db[i]) << '\n';
}

inline void write_histogram_csv(const std::string &path, const Histogram &h, const json &meta = {})
{
    auto out = open_out(path);
    if (!meta.is_null())
        out << header_comment(meta);
    out << "bin_center,density\n";
    for (std::size_t i = 0; i < h.bin_centers.size(); ++i)
        out << format_double(h.bin_centers[i]) << ',' << format_double(h.density[i]) << '\n';
}

inline void write_rmse_csv(const std::string &path, const std::vector<RMSERecord> &recs, const json &meta = {})
{
    auto out = open_out(path);
    if (!meta.is_null())
        out << header_comment(meta);
    out << "snr_db,method,rmse_deg,invalid_rate,n_trials,n_valid,n_failed,seed\n";
    for (const auto &r : recs)
        out << format_double(r.snr_db) << ',' << r.method << ',' << format_double(r.rmse_deg) << ','
            << format_double(r.invalid_rate) << ',' << r.n_trials << ',' << r.n_valid << ',' << r.n_failed << ','
            << r.seed << '\n';
}

inline json to_json(const RMSERecord &r)
{
    return json{{"snr_db", r.snr_db},
                {"method", r.method},
                {"rmse_deg", std::isnan(r.rmse_deg) ? json(nullptr) : json(r.rmse_deg)},
                {"invalid_rate", r.invalid_rate},
                {"n_trials", r.n_trials},
                {"n_valid", r.n_valid},
                {"n_failed", r.n_failed},
                {"seed", r.seed}};
}

inline void write_rb_recovery_csv(const std::string &path, const std::vector<RbRecoveryRow> &rows,
                                  const json &meta = {})
{
    auto out = open_out(path);
    if (!meta.is_null())
        out << header_comment(meta);
    out << "lag,true_value,estimated_value,stderr\n";
    for (const auto &r : rows)
        out << r.lag << ',' << format_double(r.true_value) << ',' << format_double(r.estimated_value) << ','
            << format_double(r.stderr_value) << '\n';
}

inline json to_json(const DoaEstimate &e)
{
    return json{{"theta_hat_deg", e.theta_deg}, {"valid", e.valid}, {"method", e.method}};
}

// ---------------------------------------------------------------------------
// Snapshot files
//
// Binary layout, all little-endian:
//   uint64 M, uint64 T, uint64 seed, then M*T (re, im) double pairs, row-major.

namespace detail {

inline void put_u64(std::ostream &out, std::uint64_t v)
{
    unsigned char b[8];
    for (int i = 0; i < 8; ++i)
        b[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char *>(b), 8);
}

inline std::uint64_t get_u64(std::istream &in)
{
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char *>(b), 8))
        throw IoError("snapshot file truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

inline void put_f64(std::ostream &out, double d) { put_u64(out, std::bit_cast<std::uint64_t>(d)); }
inline double get_f64(std::istream &in) { return std::bit_cast<double>(get_u64(in)); }

} // namespace detail

inline void write_snapshots_binary(const std::string &path, const SnapshotSet &s)
{
    auto out = open_out(path);
    detail::put_u64(out, static_cast<std::uint64_t>(s.data.rows()));
    detail::put_u64(out, static_cast<std::uint64_t>(s.data.cols()));
    detail::put_u64(out, s.seed);
    for (Eigen::Index i = 0; i < s.data.rows(); ++i)
        for (Eigen::Index t = 0; t < s.data.cols(); ++t) {
            detail::put_f64(out, s.data(i, t).real());
            detail::put_f64(out, s.data(i, t).imag());
        }
    if (!out)
        throw IoError("failed writing " + path);
}

/// Reads data and seed; array/source metadata are not stored in the binary file.
inline SnapshotSet read_snapshots_binary(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path);
    SnapshotSet s;
    const std::uint64_t m = detail::get_u64(in);
    const std::uint64_t t = detail::get_u64(in);
    s.seed = detail::get_u64(in);
    if (m < 1 || t < 1 || m > (1u << 20) || t > (std::uint64_t{1} << 40) / m)
        throw IoError(path + ": implausible snapshot dimensions");
    s.data.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(t));
    for (Eigen::Index i = 0; i < s.data.rows(); ++i)
        for (Eigen::Index k = 0; k < s.data.cols(); ++k) {
            const double re = detail::get_f64(in);
            const double im = detail::get_f64(in);
            s.data(i, k) = {re, im};
        }
    if (!s.data.allFinite())
        throw IoError(path + ": non-finite sample");
    s.array.n_elements = static_cast<int>(m);
    return s;
}

/// Long-format CSV for inspection: element,snapshot,re,im.
inline void write_snapshots_csv(const std::string &path, const SnapshotSet &s, const json &meta = {})
{
    auto out = open_out(path);
    if (!meta.is_null())
        out << header_comment(meta);
    out << "element,snapshot,re,im\n";
    for (Eigen::Index i = 0; i < s.data.rows(); ++i)
        for (Eigen::Index t = 0; t < s.data.cols(); ++t)
            out << i << ',' << t << ',' << format_double(s.data(i, t).real()) << ','
                << format_double(s.data(i, t).imag()) << '\n';
}

} // namespace raindoa
