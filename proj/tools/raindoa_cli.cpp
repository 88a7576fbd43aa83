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


// raindoa command line driver. Every subcommand writes CSV/JSON artifacts into
// --out and, on failure, prints {"error": {"kind", "message"}} to stderr and
// exits nonzero.

#include "raindoa.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace raindoa;

namespace {

struct CommonOptions {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = ".";
    unsigned threads = 1;
};

void add_common(CLI::App *cmd, CommonOptions &opt)
{
    cmd->add_option("--config", opt.config, "JSON experiment/scenario config");
    cmd->add_option("--seed", opt.seed, "master seed (overrides the config)");
    cmd->add_option("--out", opt.out, "output directory")->capture_default_str();
    cmd->add_option("--threads", opt.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);
}

json load_config(const CommonOptions &opt)
{
    return opt.config.empty() ? json::object() : load_json_file(opt.config);
}

// Reproduction runs must say which seed they use.
ExperimentSpec experiment_spec(const CommonOptions &opt)
{
    json j = load_config(opt);
    if (opt.seed)
        j["seed"] = *opt.seed;
    if (!j.contains("seed"))
        throw ConfigError("a seed is required: pass --seed or set \"seed\" in the config");
    ExperimentSpec spec = experiment_from_json(j);
    spec.threads = opt.threads;
    return spec;
}

fs::path out_dir(const CommonOptions &opt)
{
    fs::path dir(opt.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create output directory " + dir.string());
    return dir;
}

void write_json(const fs::path &path, const json &j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json meta_for(const ExperimentSpec &spec, const char *command)
{
    return json{{"command", command}, {"spec", to_json(spec)}};
}

void cmd_rmse_sweep(const CommonOptions &opt)
{
    const ExperimentSpec spec = experiment_spec(opt);
    const auto dir = out_dir(opt);
    const auto recs = run_rmse_sweep(spec);
    const json meta = meta_for(spec, "rmse-sweep");
    write_rmse_csv((dir / "rmse.csv").string(), recs, meta);
    json records = json::array();
    for (const auto &r : recs)
        records.push_back(to_json(r));
    write_json(dir / "rmse.json", json{{"meta", meta}, {"records", records}});
    for (const auto &r : recs)
        std::cout << r.snr_db << " dB  " << r.method << "  rmse=" << format_double(r.rmse_deg)
                  << " deg  invalid=" << r.invalid_rate << '\n';
}

void cmd_spectrum(const CommonOptions &opt)
{
    const ExperimentSpec spec = experiment_spec(opt);
    const auto dir = out_dir(opt);
    const SpectrumComparison cmp = run_spectrum_comparison(spec);
    const json meta = meta_for(spec, "spectrum");
    json est = json::array();
    auto emit = [&](const SpectrumResult &s, const char *name) {
        json m = meta;
        m["condition"] = name;
        write_spectrum_csv((dir / (std::string("spectrum_") + name + ".csv")).string(), s, m);
        json e = to_json(DoaEstimate{s.peak_angles_deg.front(), true, std::string("music/") + name});
        e["prominence_db"] = s.prominence_db();
        est.push_back(e);
    };
    emit(cmp.no_rain, "no_rain");
    emit(cmp.uncalibrated, "uncalibrated");
    emit(cmp.calibrated, "calibrated");
    write_json(dir / "spectrum_estimates.json", json{{"meta", meta}, {"estimates", est}});
    std::cout << est.dump(2) << '\n';
}

void cmd_rb_recovery(const CommonOptions &opt, bool analytic)
{
    const ExperimentSpec spec = experiment_spec(opt);
    const auto dir = out_dir(opt);
    const auto rows = analytic ? rb_recovery_analytic(spec) : run_rb_recovery(spec);
    json meta = meta_for(spec, "rb-recovery");
    meta["analytic"] = analytic;
    meta["lag0_noise_bias"] = analytic ? 0.0 : spec.source_at(spec.rb_snr_db).noise_power;
    write_rb_recovery_csv((dir / "rb_recovery.csv").string(), rows, meta);
    for (const auto &r : rows)
        std::cout << "lag " << r.lag << "  true=" << r.true_value << "  est=" << r.estimated_value
                  << "  stderr=" << r.stderr_value << '\n';
}

void cmd_pdf_study(const CommonOptions &opt, std::vector<double> alphas, std::size_t samples, const PairPdfOptions &bins)
{
    json j = load_config(opt);
    if (opt.seed)
        j["seed"] = *opt.seed;
    if (!j.contains("seed"))
        throw ConfigError("a seed is required: pass --seed or set \"seed\" in the config");
    const auto seed = j.at("seed").get<std::uint64_t>();
    std::vector<LabelledAlpha> list;
    if (alphas.empty()) {
        list = reference_alphas();
    } else {
        for (std::size_t i = 0; i < alphas.size(); ++i)
            list.push_back({"alpha" + std::to_string(i), alphas[i]});
    }
    const auto dir = out_dir(opt);
    const auto entries = run_pdf_study(list, samples, seed, bins, opt.threads);
    for (const auto &e : entries) {
        json meta{{"command", "pdf-study"}, {"case", e.label},         {"alpha", e.stats.alpha},
                  {"n_samples", samples},   {"seed", seed},            {"phase_bins", bins.phase_bins},
                  {"ratio_bins", bins.ratio_bins}, {"ratio_max", bins.ratio_max}, {"version", kVersion}};
        write_histogram_csv((dir / ("pdf_phase_" + e.label + ".csv")).string(), e.stats.phase_diff, meta);
        write_histogram_csv((dir / ("pdf_ratio_" + e.label + ".csv")).string(), e.stats.magnitude_ratio, meta);
        std::cout << "case " << e.label << "  alpha=" << e.stats.alpha
                  << "  phase std=" << e.stats.phase_stddev_deg << " deg\n";
    }
}

void cmd_calibrate(const CommonOptions &opt, const std::string &input, bool psd_clip, double spacing)
{
    const CMatrix ry = read_covariance_csv(input);
    if (!is_hermitian(ry, 1e-10))
        std::cerr << "warning: input is not Hermitian; using its Hermitian part\n";
    const auto dir = out_dir(opt);
    const CalibrationOutput cal = calibrate(ry, {psd_clip});
    const json meta{{"command", "calibrate"}, {"input", input}, {"psd_clip", psd_clip}, {"version", kVersion}};
    write_covariance_csv((dir / "rx_hat.csv").string(), cal.rx_hat, meta);
    write_covariance_csv((dir / "rt_hat.csv").string(), cal.rt_hat, meta);
    write_real_matrix_csv((dir / "rb_hat.csv").string(), cal.rb_hat, meta);
    json result{{"meta", meta},
                {"residual", cal.residual},
                {"coefficients", std::vector<double>(cal.coeffs.c.begin(), cal.coeffs.c.end())}};
    if (spacing > 0.0 && ry.rows() >= 2) {
        DoaEstimate raw = root_music(ry, 1, spacing).estimates.front();
        DoaEstimate calibrated = root_music(cal.rx_hat, 1, spacing).estimates.front();
        raw.method = "root_music/uncalibrated";
        calibrated.method = "root_music/calibrated";
        result["estimates"] = json::array({to_json(raw), to_json(calibrated)});
    }
    write_json(dir / "calibration.json", result);
    std::cout << result.dump(2) << '\n';
}

void cmd_simulate(const CommonOptions &opt, double snr_db, bool no_rain, bool csv)
{
    const ExperimentSpec spec = experiment_spec(opt);
    const auto dir = out_dir(opt);
    const DistortionCovariance rb = spec.distortion();
    SnapshotSet s = synthesize_snapshots(spec.array, spec.source_at(snr_db), no_rain ? nullptr : &rb,
                                         spec.n_snapshots, spec.seed, spec.threads);
    if (!no_rain)
        s.scenario = spec.scenario;
    json meta = meta_for(spec, "simulate");
    meta["snr_db"] = snr_db;
    meta["no_rain"] = no_rain;
    write_snapshots_binary((dir / "snapshots.bin").string(), s);
    if (csv)
        write_snapshots_csv((dir / "snapshots.csv").string(), s, meta);
    write_covariance_csv((dir / "sample_covariance.csv").string(), sample_covariance(s), meta);
    std::cout << "wrote " << s.n_elements() << " x " << s.n_snapshots() << " snapshots to " << dir.string() << '\n';
}

void cmd_fit_alpha(const CommonOptions &opt, const std::vector<std::string> &obs, bool reference, double rate,
                   bool share_shape)
{
    AlphaFit fit;
    json observations = json::array();
    if (reference || obs.empty()) {
        fit = reference_coeffs(rate, share_shape);
        for (const auto &c : kReferenceCases)
            if (c.rain_rate_mm_hr == rate || (rate != 25.0 && c.rain_rate_mm_hr == 25.0))
                observations.push_back({{"case", c.label},
                                        {"range_m", c.range_m},
                                        {"d_over_lambda0", c.d_over_lambda0},
                                        {"rain_rate_mm_hr", c.rain_rate_mm_hr},
                                        {"alpha", c.alpha}});
    } else {
        std::vector<AlphaObservation> list;
        for (const auto &o : obs) {
            std::stringstream ss(o);
            std::string a, b, c;
            if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
                throw ConfigError("observation must be R,d_over_lambda0,alpha: " + o);
            try {
                list.push_back({std::stod(a), std::stod(b), std::stod(c)});
            } catch (const std::exception &) {
                throw ConfigError("observation must be numeric: " + o);
            }
            observations.push_back({{"range_m", list.back().range_m},
                                    {"d_over_lambda0", list.back().d_over_lambda0},
                                    {"alpha", list.back().alpha}});
        }
        fit = fit_alpha_coeffs(list);
    }
    json result{{"a1", fit.coeffs.a1},        {"a2", fit.coeffs.a2}, {"a3", fit.coeffs.a3},
                {"residual", fit.residual}, {"observations", observations}, {"version", kVersion}};
    if (!opt.out.empty() && opt.out != ".")
        write_json(out_dir(opt) / "alpha_fit.json", result);
    std::cout << result.dump(2) << '\n';
}

int report(const std::string &kind, const std::string &message, int code)
{
    std::cerr << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
    return code;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"raindoa: ULA direction finding under rain-induced distortion"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    CommonOptions common;

    auto *rmse = app.add_subcommand("rmse-sweep", "RMSE of DoA estimators against SNR");
    add_common(rmse, common);

    auto *spectrum = app.add_subcommand("spectrum", "MUSIC spectra: no rain, rain, rain + calibration");
    add_common(spectrum, common);

    bool analytic = false;
    auto *rbrec = app.add_subcommand("rb-recovery", "compare estimated and true distortion covariance by lag");
    add_common(rbrec, common);
    rbrec->add_flag("--analytic", analytic, "calibrate the exact covariance instead of simulated data");

    std::vector<double> alphas;
    std::size_t samples = 1000000;
    PairPdfOptions bins;
    auto *pdf = app.add_subcommand("pdf-study", "empirical phase-difference and magnitude-ratio densities");
    add_common(pdf, common);
    pdf->add_option("--alpha", alphas, "alpha values (default: the four reference cases)");
    pdf->add_option("--samples", samples, "samples per alpha")->capture_default_str();
    pdf->add_option("--phase-bins", bins.phase_bins)->capture_default_str();
    pdf->add_option("--ratio-bins", bins.ratio_bins)->capture_default_str();
    pdf->add_option("--ratio-max", bins.ratio_max)->capture_default_str();

    std::string input;
    bool psd_clip = false;
    double spacing = 0.5;
    auto *cal = app.add_subcommand("calibrate", "Hermitian Toeplitz calibration of a covariance CSV");
    add_common(cal, common);
    cal->add_option("--in", input, "covariance CSV (rows of re,im pairs)")->required();
    cal->add_flag("--psd-clip", psd_clip, "clip negative eigenvalues before decoupling");
    cal->add_option("--spacing", spacing, "element spacing in wavelengths for root-MUSIC (0 disables)")
        ->capture_default_str();

    double snr_db = 20.0;
    bool no_rain = false, csv = false;
    auto *sim = app.add_subcommand("simulate", "write a snapshot set and its sample covariance");
    add_common(sim, common);
    sim->add_option("--snr", snr_db, "SNR in dB")->capture_default_str();
    sim->add_flag("--no-rain", no_rain, "omit the distortion");
    sim->add_flag("--csv", csv, "also write snapshots.csv");

    std::vector<std::string> obs;
    bool reference = false, share_shape = false;
    double rate = 25.0;
    auto *fit = app.add_subcommand("fit-alpha", "fit a1, a2, a3 of the empirical decorrelation model");
    add_common(fit, common);
    fit->add_option("--obs", obs, "observation R,d_over_lambda0,alpha (repeatable)");
    fit->add_flag("--reference", reference, "use the built-in reference cases");
    fit->add_option("--rate", rate, "rain rate for --reference")->capture_default_str();
    fit->add_flag("--share-shape", share_shape, "borrow a2, a3 from the 25 mm/hr fit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        return report("usage_error", e.what(), 2);
    }

    try {
        if (rmse->parsed())
            cmd_rmse_sweep(common);
        else if (spectrum->parsed())
            cmd_spectrum(common);
        else if (rbrec->parsed())
            cmd_rb_recovery(common, analytic);
        else if (pdf->parsed())
            cmd_pdf_study(common, alphas, samples, bins);
        else if (cal->parsed())
            cmd_calibrate(common, input, psd_clip, spacing);
        else if (sim->parsed())
            cmd_simulate(common, snr_db, no_rain, csv);
        else if (fit->parsed())
            cmd_fit_alpha(common, obs, reference, rate, share_shape);
    } catch (const Error &e) {
        return report(e.kind(), e.what(), 1);
    } catch (const json::exception &e) {
        return report("config_error", e.what(), 1);
    } catch (const std::exception &e) {
        return report("internal_error", e.what(), 1);
    }
    return 0;
}
