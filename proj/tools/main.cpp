// spdsim command-line front end. Talks to the shared library strictly
// through the C API in spdsim.h.

#include <spdsim.h>

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct CliError {
    int code;
    std::string message;
};

[[noreturn]] void fail_runtime(const std::string& context, spd_status status) {
    throw CliError{kExitRuntime,
                   context + ": " + spd_status_name(status) + " (" + spd_last_error() + ")"};
}

void check(spd_status status, const std::string& context) {
    if (status != SPD_OK)
        fail_runtime(context, status);
}

using DetectorPtr = std::unique_ptr<spd_detector, decltype(&spd_detector_destroy)>;
using TrainPtr = std::unique_ptr<spd_train, decltype(&spd_train_destroy)>;
using BitsPtr = std::unique_ptr<spd_bits, decltype(&spd_bits_destroy)>;
using HistPtr = std::unique_ptr<spd_hist, decltype(&spd_hist_destroy)>;
using ConfigPtr = std::unique_ptr<spd_run_config, decltype(&spd_config_destroy)>;
using SweepPtr = std::unique_ptr<spd_sweep, decltype(&spd_sweep_destroy)>;

uint64_t parse_seed_flag(const std::string& text) {
    uint64_t seed = 0;
    if (spd_parse_seed(text.c_str(), &seed) != SPD_OK)
        throw CLI::ValidationError("--seed", std::string(spd_last_error()));
    return seed;
}

DetectorPtr make_detector(const std::string& detector_name, const std::string& sim_preset,
                          double rate_hz, double dead_override_ns) {
    spd_detector* det = nullptr;
    check(spd_detector_create_preset(detector_name.c_str(), rate_hz, &det), "detector preset");
    DetectorPtr owned(det, &spd_detector_destroy);
    if (dead_override_ns >= 0.0)
        check(spd_detector_set_dead_time_constant(det, dead_override_ns), "dead time");
    else
        check(spd_detector_set_dead_time_preset(det, sim_preset.c_str()), "dead time preset");
    return owned;
}

/// Pin the effective dead time for the run's target rate, then solve the
/// photo-electron rate when the target is an output rate.
void prepare_for_rate(spd_detector* det, double target_hz, const std::string& rate_mode) {
    double dead_ns = 0.0;
    check(spd_detector_effective_dead_time(det, target_hz, &dead_ns), "effective dead time");
    check(spd_detector_set_dead_time_constant(det, dead_ns), "dead time");
    if (rate_mode == "calibrated") {
        double input_hz = 0.0;
        check(spd_detector_calibrate_input_rate(det, dead_ns, target_hz, 1e-3, &input_hz),
              "rate calibration");
        check(spd_detector_set_rate(det, input_hz), "detector rate");
    } else {
        check(spd_detector_set_rate(det, target_hz), "detector rate");
    }
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << text))
        throw CliError{kExitRuntime, "cannot write " + path};
}

std::string fit_summary(const spd_afterpulse_fit& fit, const std::string& format) {
    char buf[512];
    if (format == "json-lines") {
        std::snprintf(buf, sizeof(buf),
                      "{\"tau_ns\":%.6g,\"tau_stderr_ns\":%.6g,\"afterpulse_prob\":%.6g,"
                      "\"amplitude\":%.6g,\"window_lo_ns\":%.6g,\"window_hi_ns\":%.6g,"
                      "\"chi2_per_dof\":%.6g,\"n_bins_used\":%" PRIu64 "}\n",
                      fit.tau_ns, fit.tau_stderr_ns, fit.afterpulse_prob, fit.amplitude,
                      fit.window_lo_ns, fit.window_hi_ns, fit.chi2_per_dof, fit.n_bins_used);
    } else {
        std::snprintf(buf, sizeof(buf),
                      "tau_ns = %.6g\ntau_stderr_ns = %.6g\nafterpulse_prob = %.6g\n"
                      "amplitude = %.6g\nwindow_lo_ns = %.6g\nwindow_hi_ns = %.6g\n"
                      "chi2_per_dof = %.6g\nn_bins_used = %" PRIu64 "\n",
                      fit.tau_ns, fit.tau_stderr_ns, fit.afterpulse_prob, fit.amplitude,
                      fit.window_lo_ns, fit.window_hi_ns, fit.chi2_per_dof, fit.n_bins_used);
    }
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulator of avalanche single-photon detectors and the "
                 "beam-splitter random-bit generator built from them"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string("spdsim ") + spd_version());

    std::string config_path;
    std::string seed_text = "1";
    std::string out_path;
    int threads = 0;
    std::string format = "csv";
    app.add_option("--config", config_path, "TOML config file (sweep)")->expected(1);
    app.add_option("--seed", seed_text, "master seed, decimal or 0x-hex (default 1)");
    app.add_option("--out", out_path, "output file path");
    app.add_option("--threads", threads, "worker thread cap, 0 = all cores (sweep)");
    app.add_option("--format", format, "output format: csv|json-lines")
        ->check(CLI::IsMember({"csv", "json-lines"}));

    // ---- simulate ----
    auto* sim = app.add_subcommand("simulate", "generate a pulse train or a resolved bit stream");
    sim->fallthrough();
    std::string sim_preset = "sim2";
    std::string sim_detector = "d0";
    std::string sim_emit = "train";
    std::string sim_rate_mode = "direct";
    double sim_rate = 0.0;
    double sim_dead = -1.0;
    double sim_window = 12.0;
    uint64_t sim_pulses = 0;
    double sim_duration = 0.0;
    uint64_t sim_bits = 0;
    sim->add_option("--preset", sim_preset, "dead-time preset: sim1|sim2|sim3 (default sim2)")
        ->check(CLI::IsMember({"sim1", "sim2", "sim3"}));
    sim->add_option("--detector", sim_detector, "detector preset: d0|d1 (default d0)")
        ->check(CLI::IsMember({"d0", "d1"}));
    sim->add_option("--rate", sim_rate, "target rate in Hz")->required();
    sim->add_option("--dead", sim_dead, "constant dead time override in ns");
    sim->add_option("--emit", sim_emit, "train|bits (default train)")
        ->check(CLI::IsMember({"train", "bits"}));
    sim->add_option("--window", sim_window, "coincidence window in ns for --emit bits (default 12)");
    auto* opt_pulses = sim->add_option("--pulses", sim_pulses, "stop after N pulses");
    auto* opt_duration = sim->add_option("--duration", sim_duration, "stop after T ns");
    sim->add_option("--bits", sim_bits, "bit count for --emit bits");
    sim->add_option("--rate-mode", sim_rate_mode,
                    "direct|calibrated: feed --rate in directly, or solve the photo-electron "
                    "rate so the output rate matches it")
        ->check(CLI::IsMember({"direct", "calibrated"}));
    opt_pulses->excludes(opt_duration);

    // ---- hist ----
    auto* hist_cmd = app.add_subcommand("hist", "interarrival histogram with background columns");
    hist_cmd->fallthrough();
    std::string hist_train_path;
    double hist_bin = 1.0;
    double hist_tmax = 1000.0;
    double hist_rate = 0.0;
    hist_cmd->add_option("--train", hist_train_path, "pulse-train file")->required();
    hist_cmd->add_option("--bin", hist_bin, "bin width in ns (default 1)");
    hist_cmd->add_option("--tmax", hist_tmax, "histogram range in ns (default 1000)");
    hist_cmd->add_option("--rate", hist_rate,
                         "photon rate in Hz for the background shape (default: from the file)");

    // ---- fit ----
    auto* fit_cmd = app.add_subcommand("fit", "afterpulse lifetime/probability fit");
    fit_cmd->fallthrough();
    std::string fit_train_path;
    double fit_bin = 1.0;
    double fit_tmax = 1000.0;
    double fit_rate = 0.0;
    double fit_dead = -1.0;
    double fit_window_lo = 0.0;
    double fit_window_hi = 0.0;
    double fit_tau_guess = 40.0;
    fit_cmd->add_option("--train", fit_train_path, "pulse-train file")->required();
    fit_cmd->add_option("--dead", fit_dead, "dead time in ns (default: from the file)");
    fit_cmd->add_option("--bin", fit_bin, "bin width in ns (default 1)");
    fit_cmd->add_option("--tmax", fit_tmax, "histogram range in ns (default 1000)");
    fit_cmd->add_option("--rate", fit_rate, "photon rate in Hz (default: from the file)");
    fit_cmd->add_option("--window-lo", fit_window_lo, "fit window start in ns");
    fit_cmd->add_option("--window-hi", fit_window_hi, "fit window end in ns");
    fit_cmd->add_option("--tau-guess", fit_tau_guess, "lifetime guess for the default window");

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand("sweep", "autocorrelation sweep over detection rates");
    sweep_cmd->fallthrough();
    std::string sweep_preset;
    std::string sweep_rate_mode;
    double sweep_window = -1.0;
    std::uint64_t sweep_bits = 0;
    std::vector<double> sweep_freqs;
    sweep_cmd->add_option("--preset", sweep_preset, "sim1|sim2|sim3 full configuration")
        ->check(CLI::IsMember({"sim1", "sim2", "sim3"}));
    sweep_cmd->add_option("--bits-per-point", sweep_bits, "bits per frequency point");
    sweep_cmd->add_option("--rate-mode", sweep_rate_mode, "direct|calibrated")
        ->check(CLI::IsMember({"direct", "calibrated"}));
    sweep_cmd->add_option("--window", sweep_window, "coincidence window override in ns");
    sweep_cmd->add_option("--freq", sweep_freqs, "explicit frequency list in Hz (ascending)");

    // ---- compare ----
    auto* cmp_cmd = app.add_subcommand("compare", "compare a sweep against the bundled table");
    cmp_cmd->fallthrough();
    std::string cmp_run_path;
    std::string cmp_column = "meas";
    cmp_cmd->add_option("--run", cmp_run_path, "sweep CSV produced by the sweep command")
        ->required();
    cmp_cmd->add_option("--column", cmp_column, "meas|sim1|sim2|sim3 (default meas)")
        ->check(CLI::IsMember({"meas", "sim1", "sim2", "sim3"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) // --help / --version
            return app.exit(e);
        std::cerr << app.help() << "\nerror: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        const uint64_t master_seed = parse_seed_flag(seed_text);

        if (sim->parsed()) {
            if (out_path.empty())
                throw CLI::RequiredError("--out");
            if (sim_emit == "bits") {
                if (sim_bits == 0)
                    throw CLI::RequiredError("--bits");
                DetectorPtr d0 = make_detector("d0", sim_preset, sim_rate, sim_dead);
                DetectorPtr d1 = make_detector("d1", sim_preset, sim_rate, sim_dead);
                prepare_for_rate(d0.get(), sim_rate, sim_rate_mode);
                prepare_for_rate(d1.get(), sim_rate, sim_rate_mode);
                spd_bits* bits = nullptr;
                check(spd_generate_bits(d0.get(), d1.get(), sim_window, sim_bits, master_seed,
                                        &bits),
                      "bit generation");
                BitsPtr owned(bits, &spd_bits_destroy);
                check(spd_bits_save(bits, out_path.c_str()), "bitstream save");
                std::printf("wrote %" PRIu64 " bits (%" PRIu64 " coincidences rejected) to %s\n",
                            spd_bits_size(bits), spd_bits_coincidences(bits), out_path.c_str());
                return kExitOk;
            }
            if (sim_pulses == 0 && !(sim_duration > 0.0))
                throw CLI::RequiredError("--pulses or --duration");
            DetectorPtr det = make_detector(sim_detector, sim_preset, sim_rate, sim_dead);
            prepare_for_rate(det.get(), sim_rate, sim_rate_mode);
            spd_train* train = nullptr;
            if (sim_pulses > 0)
                check(spd_train_generate_n(det.get(), sim_pulses, master_seed, &train),
                      "train generation");
            else
                check(spd_train_generate_duration(det.get(), sim_duration, master_seed, &train),
                      "train generation");
            TrainPtr owned(train, &spd_train_destroy);
            check(spd_train_save(train, out_path.c_str()), "train save");
            std::printf("wrote %" PRIu64 " pulses (%" PRIu64 " afterpulses) to %s\n",
                        spd_train_size(train), spd_train_afterpulse_count(train),
                        out_path.c_str());
            return kExitOk;
        }

        if (hist_cmd->parsed() || fit_cmd->parsed()) {
            const bool fitting = fit_cmd->parsed();
            const std::string train_path = fitting ? fit_train_path : hist_train_path;
            const double bin = fitting ? fit_bin : hist_bin;
            const double tmax = fitting ? fit_tmax : hist_tmax;
            double rate = fitting ? fit_rate : hist_rate;

            spd_train* train = nullptr;
            check(spd_train_load(train_path.c_str(), &train), "train load");
            TrainPtr owned_train(train, &spd_train_destroy);
            if (!(rate > 0.0))
                rate = spd_train_photon_rate_hz(train);

            spd_hist* hist = nullptr;
            check(spd_histogram(train, bin, tmax, &hist), "histogram");
            HistPtr owned_hist(hist, &spd_hist_destroy);
            check(spd_hist_subtract_background(hist, rate), "background subtraction");

            if (!fitting) {
                if (out_path.empty())
                    throw CLI::RequiredError("--out");
                check(spd_hist_save(hist, out_path.c_str(), format.c_str()), "histogram save");
                std::printf("wrote %zu bins to %s\n", spd_hist_n_bins(hist), out_path.c_str());
                return kExitOk;
            }

            double dead = fit_dead >= 0.0 ? fit_dead : spd_train_dead_time_ns(train);
            spd_afterpulse_fit fit{};
            check(spd_fit_afterpulse(hist, dead, fit_window_lo, fit_window_hi, fit_tau_guess,
                                     &fit),
                  "afterpulse fit");
            const std::string summary = fit_summary(fit, format);
            std::fputs(summary.c_str(), stdout);
            if (!out_path.empty())
                write_text(out_path, summary);
            return kExitOk;
        }

        if (sweep_cmd->parsed()) {
            if (out_path.empty())
                throw CLI::RequiredError("--out");
            if (sweep_preset.empty() && config_path.empty())
                throw CLI::RequiredError("--preset or --config");
            spd_run_config* cfg = nullptr;
            if (!config_path.empty())
                check(spd_config_load(config_path.c_str(), &cfg), "config load");
            else
                check(spd_config_preset(sweep_preset.c_str(), &cfg), "config preset");
            ConfigPtr owned_cfg(cfg, &spd_config_destroy);
            if (!sweep_preset.empty() && !config_path.empty())
                throw CLI::ValidationError("--preset", "cannot combine with --config");
            check(spd_config_set_seed(cfg, master_seed), "config seed");
            if (sweep_bits > 0)
                check(spd_config_set_bits_per_point(cfg, sweep_bits), "config bits per point");
            if (!sweep_rate_mode.empty())
                check(spd_config_set_rate_mode(cfg, sweep_rate_mode.c_str()), "config rate mode");
            if (sweep_window >= 0.0)
                check(spd_config_set_window(cfg, sweep_window), "config window");
            if (!sweep_freqs.empty())
                check(spd_config_set_frequencies(cfg, sweep_freqs.data(), sweep_freqs.size()),
                      "config frequencies");

            spd_sweep* sweep = nullptr;
            check(spd_sweep_run(cfg, threads, &sweep), "sweep");
            SweepPtr owned_sweep(sweep, &spd_sweep_destroy);
            check(spd_sweep_save(sweep, out_path.c_str(), format.c_str()), "sweep save");
            std::printf("wrote %zu rows to %s\n", spd_sweep_size(sweep), out_path.c_str());
            for (const char* column : {"meas", "sim1", "sim2", "sim3"}) {
                double r = 0.0;
                if (spd_sweep_r_vs(sweep, column, &r) == SPD_OK)
                    std::printf("R_vs_%s = %.6g\n", column, r);
            }
            return kExitOk;
        }

        if (cmp_cmd->parsed()) {
            spd_sweep* sweep = nullptr;
            check(spd_sweep_load_csv(cmp_run_path.c_str(), &sweep), "sweep load");
            SweepPtr owned(sweep, &spd_sweep_destroy);
            double r = 0.0;
            check(spd_compare_to_reference(sweep, cmp_column.c_str(),
                                           out_path.empty() ? nullptr : out_path.c_str(),
                                           format.c_str(), &r),
                  "compare");
            const size_t n = spd_sweep_size(sweep);
            for (size_t i = 0; i < n; ++i) {
                spd_sweep_row row{};
                check(spd_sweep_row_get(sweep, i, &row), "sweep row");
                double freq = 0.0, a_ref = 0.0;
                double meas = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
                check(spd_reference_row_get(i, &freq, &meas, nullptr, &s1, &s2, &s3),
                      "reference row");
                a_ref = cmp_column == "meas" ? meas
                        : cmp_column == "sim1" ? s1
                        : cmp_column == "sim2" ? s2
                                               : s3;
                std::printf("f=%-10.6g a_run=%+.6f a_%s=%+.6f ratio=%.4f\n", row.frequency_hz,
                            row.autocorr, cmp_column.c_str(), a_ref, row.autocorr / a_ref);
            }
            std::printf("R_vs_%s = %.6g\n", cmp_column.c_str(), r);
            return kExitOk;
        }

        throw CliError{kExitUsage, "no subcommand given"};
    } catch (const CLI::Error& e) {
        std::cerr << app.help() << "\n" << e.what() << "\n";
        return kExitUsage;
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
