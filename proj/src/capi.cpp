#include "spdsim.h"

#include <cstring>
#include <optional>
#include <string>

#include "config.hpp"
#include "detector.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "reference_table.hpp"
#include "resolver.hpp"
#include "rng.hpp"
#include "stats.hpp"

struct spd_rng {
    spd::Rng impl;
};
struct spd_detector {
    spd::DetectorParams impl;
};
struct spd_train {
    spd::PulseTrain impl;
};
struct spd_bits {
    spd::BitStream impl;
};
struct spd_hist {
    spd::IntervalHistogram hist;
    std::optional<spd::ResidualHistogram> residual;
};
struct spd_run_config {
    spd::RunConfig impl;
};
struct spd_sweep {
    spd::SweepReport impl;
};

namespace {

thread_local std::string g_last_error;

spd_status fail(spd_status status, const char* what) {
    g_last_error = what != nullptr ? what : "";
    return status;
}

spd_status status_from(const spd::Error& e) {
    using spd::ErrorCode;
    switch (e.code()) {
    case ErrorCode::InvalidArgument:
        return SPD_ERR_INVALID_ARGUMENT;
    case ErrorCode::Numeric:
        return SPD_ERR_NUMERIC;
    case ErrorCode::Fit:
        return SPD_ERR_FIT;
    case ErrorCode::Io:
        return SPD_ERR_IO;
    case ErrorCode::Config:
        return SPD_ERR_CONFIG;
    case ErrorCode::Internal:
        return SPD_ERR_INTERNAL;
    }
    return SPD_ERR_INTERNAL;
}

/// Runs the body, translating exceptions into status codes.
template <typename Fn> spd_status guarded(Fn&& fn) {
    try {
        fn();
        return SPD_OK;
    } catch (const spd::Error& e) {
        return fail(status_from(e), e.what());
    } catch (const std::exception& e) {
        return fail(SPD_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SPD_ERR_INTERNAL, "unknown error");
    }
}

template <typename T> spd_status require(const T* ptr, const char* what) {
    return ptr == nullptr ? fail(SPD_ERR_INVALID_ARGUMENT, what) : SPD_OK;
}

spd::ResolverConfig window_config(double window_ns) {
    spd::ResolverConfig cfg;
    cfg.coincidence_window_ns = window_ns;
    cfg.validate();
    return cfg;
}

} // namespace

extern "C" {

const char* spd_version(void) { return "1.0.0"; }

const char* spd_status_name(spd_status status) {
    switch (status) {
    case SPD_OK:
        return "ok";
    case SPD_ERR_INVALID_ARGUMENT:
        return "invalid argument";
    case SPD_ERR_NUMERIC:
        return "numeric error";
    case SPD_ERR_FIT:
        return "fit error";
    case SPD_ERR_IO:
        return "io error";
    case SPD_ERR_CONFIG:
        return "config error";
    case SPD_ERR_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

const char* spd_last_error(void) { return g_last_error.c_str(); }

uint64_t spd_derive_seed(uint64_t master_seed, uint64_t index) {
    return spd::derive_seed(master_seed, index);
}

spd_status spd_parse_seed(const char* text, uint64_t* out_seed) {
    if (auto s = require(text, "null seed text"); s != SPD_OK)
        return s;
    if (auto s = require(out_seed, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] { *out_seed = spd::parse_seed(text); });
}

spd_status spd_rng_create(uint64_t seed, spd_rng** out) {
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] { *out = new spd_rng{spd::Rng(seed)}; });
}

void spd_rng_destroy(spd_rng* rng) { delete rng; }

spd_status spd_rng_uniform(spd_rng* rng, double* out) {
    if (auto s = require(rng, "null rng handle"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] { *out = rng->impl.uniform(); });
}

spd_status spd_rng_exponential(spd_rng* rng, double mean, double* out) {
    if (auto s = require(rng, "null rng handle"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] { *out = rng->impl.exponential(mean); });
}

spd_status spd_detector_create(double photon_rate_hz, double afterpulse_prob,
                               double afterpulse_tau_ns, spd_detector** out) {
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] {
        spd::DetectorParams p;
        p.photon_rate_hz = photon_rate_hz;
        p.afterpulse_prob = afterpulse_prob;
        p.afterpulse_tau_ns = afterpulse_tau_ns;
        p.validate();
        *out = new spd_detector{p};
    });
}

spd_status spd_detector_create_preset(const char* name, double photon_rate_hz,
                                      spd_detector** out) {
    if (auto s = require(name, "null preset name"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded(
        [&] { *out = new spd_detector{spd::DetectorParams::preset(name, photon_rate_hz)}; });
}

spd_status spd_detector_set_rate(spd_detector* det, double photon_rate_hz) {
    if (auto s = require(det, "null detector handle"); s != SPD_OK)
        return s;
    return guarded([&] {
        spd::DetectorParams p = det->impl;
        p.photon_rate_hz = photon_rate_hz;
        p.validate();
        det->impl = p;
    });
}

spd_status spd_detector_set_dead_time_constant(spd_detector* det, double dead_ns) {
    if (auto s = require(det, "null detector handle"); s != SPD_OK)
        return s;
    return guarded([&] { det->impl.dead_time = spd::DeadTimeModel::constant(dead_ns); });
}

spd_status spd_detector_set_dead_time_ramp(spd_detector* det, double base_ns, double knee_hz,
                                           double max_hz, double max_ns) {
    if (auto s = require(det, "null detector handle"); s != SPD_OK)
        return s;
    return guarded(
        [&] { det->impl.dead_time = spd::DeadTimeModel::rate_ramp(base_ns, knee_hz, max_hz, max_ns); });
}

spd_status spd_detector_set_dead_time_preset(spd_detector* det, const char* name) {
    if (auto s = require(det, "null detector handle"); s != SPD_OK)
        return s;
    if (auto s = require(name, "null preset name"); s != SPD_OK)
        return s;
    return guarded([&] { det->impl.dead_time = spd::DeadTimeModel::preset(name); });
}

void spd_detector_destroy(spd_detector* det) { delete det; }

spd_status spd_detector_effective_dead_time(const spd_detector* det, double f_hz,
                                            double* out_ns) {
    if (auto s = require(det, "null detector handle"); s != SPD_OK)
        return s;
    if (auto s = require(out_ns, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] { *out_ns = det->impl.dead_time.effective_ns(f_hz); });
}

spd_status spd_detector_expected_interval(const spd_detector* det, double dead_ns,
                                          double* out_ns) {
    if (auto s = require(det, "null detector handle"); s != SPD_OK)
        return s;
    if (auto s = require(out_ns, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] { *out_ns = spd::expected_interval_ns(det->impl, dead_ns); });
}

spd_status spd_detector_calibrate_input_rate(const spd_detector* det, double dead_ns,
                                             double target_output_hz, double rel_tol,
                                             double* out_hz) {
    if (auto s = require(det, "null detector handle"); s != SPD_OK)
        return s;
    if (auto s = require(out_hz, "null output pointer"); s != SPD_OK)
        return s;
    return guarded(
        [&] { *out_hz = spd::calibrate_input_rate(det->impl, dead_ns, target_output_hz, rel_tol); });
}

spd_status spd_train_generate_n(const spd_detector* det, uint64_t n_pulses, uint64_t seed,
                                spd_train** out) {
    if (auto s = require(det, "null detector handle"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded(
        [&] { *out = new spd_train{spd::generate_pulse_train_n(det->impl, n_pulses, seed)}; });
}

spd_status spd_train_generate_duration(const spd_detector* det, double duration_ns,
                                       uint64_t seed, spd_train** out) {
    if (auto s = require(det, "null detector handle"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded(
        [&] { *out = new spd_train{spd::generate_pulse_train_for(det->impl, duration_ns, seed)}; });
}

uint64_t spd_train_size(const spd_train* train) { return train ? train->impl.size() : 0; }

const double* spd_train_timestamps(const spd_train* train) {
    return train ? train->impl.timestamps_ns.data() : nullptr;
}

uint64_t spd_train_afterpulse_count(const spd_train* train) {
    return train ? train->impl.afterpulse_count : 0;
}

uint64_t spd_train_photon_count(const spd_train* train) {
    return train ? train->impl.photon_count : 0;
}

double spd_train_dead_time_ns(const spd_train* train) {
    return train ? train->impl.dead_time_ns : 0.0;
}

double spd_train_photon_rate_hz(const spd_train* train) {
    return train ? train->impl.params.photon_rate_hz : 0.0;
}

spd_status spd_train_save(const spd_train* train, const char* path) {
    if (auto s = require(train, "null train handle"); s != SPD_OK)
        return s;
    if (auto s = require(path, "null path"); s != SPD_OK)
        return s;
    return guarded([&] { spd::write_pulse_train(path, train->impl); });
}

spd_status spd_train_load(const char* path, spd_train** out) {
    if (auto s = require(path, "null path"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] { *out = new spd_train{spd::read_pulse_train(path)}; });
}

void spd_train_destroy(spd_train* train) { delete train; }

spd_status spd_resolve(const spd_train* train0, const spd_train* train1,
                       double coincidence_window_ns, spd_bits** out) {
    if (auto s = require(train0, "null train handle"); s != SPD_OK)
        return s;
    if (auto s = require(train1, "null train handle"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] {
        *out = new spd_bits{
            spd::resolve_bits(train0->impl, train1->impl, window_config(coincidence_window_ns))};
    });
}

spd_status spd_generate_bits(const spd_detector* det0, const spd_detector* det1,
                             double coincidence_window_ns, uint64_t n_bits, uint64_t seed,
                             spd_bits** out) {
    if (auto s = require(det0, "null detector handle"); s != SPD_OK)
        return s;
    if (auto s = require(det1, "null detector handle"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] {
        spd::DetectorStream s0(det0->impl, spd::derive_seed(seed, 0));
        spd::DetectorStream s1(det1->impl, spd::derive_seed(seed, 1));
        spd::StreamingResolver resolver(window_config(coincidence_window_ns));
        resolver.reserve_bits(n_bits);
        const uint64_t max_pulses = 64 * n_bits + 1'000'000;
        std::vector<double> chunk(4096);
        while (resolver.bits().size() < n_bits) {
            if (s0.pulse_count() + s1.pulse_count() > max_pulses)
                spd::throw_numeric("coincidence window rejects nearly all pulses");
            const bool refill0 = resolver.wants0();
            spd::DetectorStream& src = refill0 ? s0 : s1;
            for (auto& t : chunk)
                t = src.next_timestamp_ns();
            if (refill0)
                resolver.push0(chunk);
            else
                resolver.push1(chunk);
        }
        spd::BitStream bits = resolver.take();
        bits.truncate(n_bits);
        *out = new spd_bits{std::move(bits)};
    });
}

uint64_t spd_bits_size(const spd_bits* bits) { return bits ? bits->impl.size() : 0; }
uint64_t spd_bits_ones(const spd_bits* bits) { return bits ? bits->impl.n_ones() : 0; }
uint64_t spd_bits_zeros(const spd_bits* bits) { return bits ? bits->impl.n_zeros() : 0; }
uint64_t spd_bits_coincidences(const spd_bits* bits) {
    return bits ? bits->impl.n_coincidences() : 0;
}

int spd_bits_get(const spd_bits* bits, uint64_t index) {
    if (bits == nullptr || index >= bits->impl.size())
        return -1;
    return bits->impl.get(index) ? 1 : 0;
}

spd_status spd_bits_save(const spd_bits* bits, const char* path) {
    if (auto s = require(bits, "null bits handle"); s != SPD_OK)
        return s;
    if (auto s = require(path, "null path"); s != SPD_OK)
        return s;
    return guarded([&] { spd::write_bitstream(path, bits->impl); });
}

spd_status spd_bits_load(const char* path, spd_bits** out) {
    if (auto s = require(path, "null path"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] { *out = new spd_bits{spd::read_bitstream(path)}; });
}

void spd_bits_destroy(spd_bits* bits) { delete bits; }

spd_status spd_autocorrelation(const spd_bits* bits, uint32_t lag, spd_autocorr_result* out) {
    if (auto s = require(bits, "null bits handle"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] {
        const spd::AutocorrResult r = spd::serial_autocorrelation(bits->impl, lag);
        out->lag = r.lag;
        out->coefficient = r.coefficient;
        out->std_error = r.std_error;
        out->n_bits = r.n_bits;
    });
}

spd_status spd_rms_error(const double* a, const double* b, size_t n, double* out) {
    if (auto s = require(a, "null column pointer"); s != SPD_OK)
        return s;
    if (auto s = require(b, "null column pointer"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] { *out = spd::rms_error({a, n}, {b, n}); });
}

spd_status spd_histogram(const spd_train* train, double bin_width_ns, double t_max_ns,
                         spd_hist** out) {
    if (auto s = require(train, "null train handle"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] {
        *out = new spd_hist{spd::interarrival_histogram(train->impl, bin_width_ns, t_max_ns), {}};
    });
}

spd_status spd_hist_subtract_background(spd_hist* hist, double photon_rate_hz) {
    if (auto s = require(hist, "null histogram handle"); s != SPD_OK)
        return s;
    return guarded([&] { hist->residual = spd::subtract_background(hist->hist, photon_rate_hz); });
}

size_t spd_hist_n_bins(const spd_hist* hist) { return hist ? hist->hist.n_bins() : 0; }

double spd_hist_bin_width_ns(const spd_hist* hist) { return hist ? hist->hist.bin_width_ns : 0.0; }

spd_status spd_hist_bin(const spd_hist* hist, size_t index, double* out_start_ns,
                        double* out_count, double* out_background, double* out_residual) {
    if (auto s = require(hist, "null histogram handle"); s != SPD_OK)
        return s;
    if (index >= hist->hist.n_bins())
        return fail(SPD_ERR_INVALID_ARGUMENT, "histogram bin index out of range");
    const double count = static_cast<double>(hist->hist.counts[index]);
    if (out_start_ns)
        *out_start_ns = hist->hist.bin_start_ns(index);
    if (out_count)
        *out_count = count;
    if (out_background)
        *out_background = hist->residual ? hist->residual->background[index] : 0.0;
    if (out_residual)
        *out_residual = hist->residual ? hist->residual->residual[index] : count;
    return SPD_OK;
}

spd_status spd_hist_save(const spd_hist* hist, const char* path, const char* format) {
    if (auto s = require(hist, "null histogram handle"); s != SPD_OK)
        return s;
    if (auto s = require(path, "null path"); s != SPD_OK)
        return s;
    if (auto s = require(format, "null format"); s != SPD_OK)
        return s;
    return guarded([&] {
        spd::ResidualHistogram res;
        if (hist->residual) {
            res = *hist->residual;
        } else {
            res.hist = hist->hist;
            res.background.assign(hist->hist.n_bins(), 0.0);
            res.residual.reserve(hist->hist.n_bins());
            for (const auto c : hist->hist.counts)
                res.residual.push_back(static_cast<double>(c));
        }
        spd::write_histogram(path, res, spd::output_format_from_name(format));
    });
}

void spd_hist_destroy(spd_hist* hist) { delete hist; }

spd_status spd_fit_afterpulse(const spd_hist* hist, double dead_ns, double window_lo_ns,
                              double window_hi_ns, double tau_guess_ns,
                              spd_afterpulse_fit* out) {
    if (auto s = require(hist, "null histogram handle"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    if (!hist->residual)
        return fail(SPD_ERR_INVALID_ARGUMENT,
                    "background not subtracted (call spd_hist_subtract_background first)");
    return guarded([&] {
        std::optional<spd::FitWindow> window;
        if (window_hi_ns > window_lo_ns)
            window = spd::FitWindow{window_lo_ns, window_hi_ns};
        const spd::AfterpulseFit fit =
            spd::fit_afterpulse(*hist->residual, dead_ns, window, tau_guess_ns);
        out->tau_ns = fit.tau_ns;
        out->tau_stderr_ns = fit.tau_stderr_ns;
        out->amplitude = fit.amplitude;
        out->afterpulse_prob = fit.afterpulse_prob;
        out->window_lo_ns = fit.window.lo_ns;
        out->window_hi_ns = fit.window.hi_ns;
        out->chi2_per_dof = fit.chi2_per_dof;
        out->n_bins_used = fit.n_bins_used;
    });
}

spd_status spd_config_preset(const char* sim_preset, spd_run_config** out) {
    if (auto s = require(sim_preset, "null preset name"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] { *out = new spd_run_config{spd::preset_run_config(sim_preset)}; });
}

spd_status spd_config_load(const char* path, spd_run_config** out) {
    if (auto s = require(path, "null path"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] { *out = new spd_run_config{spd::load_run_config(path)}; });
}

spd_status spd_config_set_seed(spd_run_config* cfg, uint64_t master_seed) {
    if (auto s = require(cfg, "null config handle"); s != SPD_OK)
        return s;
    cfg->impl.master_seed = master_seed;
    return SPD_OK;
}

spd_status spd_config_set_bits_per_point(spd_run_config* cfg, uint64_t n_bits) {
    if (auto s = require(cfg, "null config handle"); s != SPD_OK)
        return s;
    return guarded([&] {
        cfg->impl.n_bits_per_point = n_bits;
        cfg->impl.validate();
    });
}

spd_status spd_config_set_rate_mode(spd_run_config* cfg, const char* mode) {
    if (auto s = require(cfg, "null config handle"); s != SPD_OK)
        return s;
    if (auto s = require(mode, "null mode"); s != SPD_OK)
        return s;
    return guarded([&] { cfg->impl.rate_mode = spd::rate_mode_from_name(mode); });
}

spd_status spd_config_set_window(spd_run_config* cfg, double coincidence_window_ns) {
    if (auto s = require(cfg, "null config handle"); s != SPD_OK)
        return s;
    return guarded([&] {
        cfg->impl.resolver.coincidence_window_ns = coincidence_window_ns;
        cfg->impl.resolver.validate();
    });
}

spd_status spd_config_set_frequencies(spd_run_config* cfg, const double* freqs_hz, size_t n) {
    if (auto s = require(cfg, "null config handle"); s != SPD_OK)
        return s;
    if (n > 0) {
        if (auto s = require(freqs_hz, "null frequency array"); s != SPD_OK)
            return s;
    }
    return guarded([&] {
        cfg->impl.frequencies_hz.assign(freqs_hz, freqs_hz + n);
        cfg->impl.validate();
    });
}

spd_status spd_config_set_detector(spd_run_config* cfg, int which, const spd_detector* det) {
    if (auto s = require(cfg, "null config handle"); s != SPD_OK)
        return s;
    if (auto s = require(det, "null detector handle"); s != SPD_OK)
        return s;
    if (which != 0 && which != 1)
        return fail(SPD_ERR_INVALID_ARGUMENT, "detector index must be 0 or 1");
    (which == 0 ? cfg->impl.detector0 : cfg->impl.detector1) = det->impl;
    return SPD_OK;
}

void spd_config_destroy(spd_run_config* cfg) { delete cfg; }

spd_status spd_sweep_run(const spd_run_config* cfg, int threads, spd_sweep** out) {
    if (auto s = require(cfg, "null config handle"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] { *out = new spd_sweep{spd::run_sweep(cfg->impl, threads)}; });
}

size_t spd_sweep_size(const spd_sweep* sweep) { return sweep ? sweep->impl.rows.size() : 0; }

spd_status spd_sweep_row_get(const spd_sweep* sweep, size_t index, spd_sweep_row* out) {
    if (auto s = require(sweep, "null sweep handle"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    if (index >= sweep->impl.rows.size())
        return fail(SPD_ERR_INVALID_ARGUMENT, "sweep row index out of range");
    const spd::PointResult& r = sweep->impl.rows[index];
    out->frequency_hz = r.frequency_hz;
    out->autocorr = r.autocorr.coefficient;
    out->std_error = r.autocorr.std_error;
    out->n_bits = r.autocorr.n_bits;
    out->n_coincidences = r.n_coincidences;
    out->rate_d0_hz = r.rate_d0_hz;
    out->rate_d1_hz = r.rate_d1_hz;
    return SPD_OK;
}

spd_status spd_sweep_save(const spd_sweep* sweep, const char* path, const char* format) {
    if (auto s = require(sweep, "null sweep handle"); s != SPD_OK)
        return s;
    if (auto s = require(path, "null path"); s != SPD_OK)
        return s;
    if (auto s = require(format, "null format"); s != SPD_OK)
        return s;
    return guarded(
        [&] { spd::write_sweep(path, sweep->impl, spd::output_format_from_name(format)); });
}

spd_status spd_sweep_load_csv(const char* path, spd_sweep** out) {
    if (auto s = require(path, "null path"); s != SPD_OK)
        return s;
    if (auto s = require(out, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] { *out = new spd_sweep{spd::read_sweep_csv(path)}; });
}

void spd_sweep_destroy(spd_sweep* sweep) { delete sweep; }

spd_status spd_sweep_r_vs(const spd_sweep* sweep, const char* column, double* out_r) {
    if (auto s = require(sweep, "null sweep handle"); s != SPD_OK)
        return s;
    if (auto s = require(column, "null column name"); s != SPD_OK)
        return s;
    if (auto s = require(out_r, "null output pointer"); s != SPD_OK)
        return s;
    return guarded([&] {
        const auto cmp = spd::compare_to_reference(sweep->impl, spd::reference_table(),
                                                   spd::ref_column_from_name(column));
        *out_r = cmp.r_value;
    });
}

spd_status spd_compare_to_reference(const spd_sweep* sweep, const char* column,
                                    const char* out_path, const char* format, double* out_r) {
    if (auto s = require(sweep, "null sweep handle"); s != SPD_OK)
        return s;
    if (auto s = require(column, "null column name"); s != SPD_OK)
        return s;
    return guarded([&] {
        const auto cmp = spd::compare_to_reference(sweep->impl, spd::reference_table(),
                                                   spd::ref_column_from_name(column));
        if (out_path != nullptr) {
            const auto fmt = format != nullptr ? spd::output_format_from_name(format)
                                               : spd::OutputFormat::Csv;
            spd::write_comparison(out_path, cmp, fmt);
        }
        if (out_r != nullptr)
            *out_r = cmp.r_value;
    });
}

size_t spd_reference_rows(void) { return spd::ReferenceTable::n_rows; }

spd_status spd_reference_row_get(size_t index, double* out_frequency_hz, double* out_a_meas,
                                 double* out_meas_error, double* out_a_sim1, double* out_a_sim2,
                                 double* out_a_sim3) {
    if (index >= spd::ReferenceTable::n_rows)
        return fail(SPD_ERR_INVALID_ARGUMENT, "reference row index out of range");
    const spd::ReferenceRow& r = spd::reference_table().rows[index];
    if (out_frequency_hz)
        *out_frequency_hz = r.frequency_hz;
    if (out_a_meas)
        *out_a_meas = r.a_meas;
    if (out_meas_error)
        *out_meas_error = r.meas_error;
    if (out_a_sim1)
        *out_a_sim1 = r.a_sim1;
    if (out_a_sim2)
        *out_a_sim2 = r.a_sim2;
    if (out_a_sim3)
        *out_a_sim3 = r.a_sim3;
    return SPD_OK;
}

double spd_reference_sim_error(void) { return spd::ReferenceTable::sim_error; }

spd_status spd_reference_save_csv(const char* path) {
    if (auto s = require(path, "null path"); s != SPD_OK)
        return s;
    return guarded([&] { spd::write_reference_csv(path, spd::reference_table()); });
}

} // extern "C"
