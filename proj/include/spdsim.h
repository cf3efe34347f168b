/*
 * spdsim — Monte Carlo simulation of avalanche single-photon detectors
 * (dead time, afterpulsing, rate-dependent recovery) feeding a
 * beam-splitter random-bit resolver, with the analysis toolkit for serial
 * autocorrelation studies of the resulting bit streams.
 *
 * C API of the shared library. All entry points return spd_status (except
 * trivial accessors); on failure spd_last_error() carries a description
 * for the calling thread. Objects are opaque handles created and released
 * through their create/destroy pairs; handles are not thread-safe, but
 * distinct handles may be used from distinct threads freely.
 */

#ifndef SPDSIM_H
#define SPDSIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum spd_status {
    SPD_OK = 0,
    SPD_ERR_INVALID_ARGUMENT = 1,
    SPD_ERR_NUMERIC = 2,
    SPD_ERR_FIT = 3,
    SPD_ERR_IO = 4,
    SPD_ERR_CONFIG = 5,
    SPD_ERR_INTERNAL = 6
} spd_status;

const char* spd_version(void);
const char* spd_status_name(spd_status status);
/* Message of the most recent failure on this thread ("" if none yet). */
const char* spd_last_error(void);

/* ---------- seeding ----------
 * All randomness derives from 64-bit seeds feeding a xoshiro256++
 * generator (SplitMix64 state expansion). spd_derive_seed gives
 * collision-free per-stream seeds for parallel work. */
uint64_t spd_derive_seed(uint64_t master_seed, uint64_t index);
/* Decimal or 0x-prefixed hex. */
spd_status spd_parse_seed(const char* text, uint64_t* out_seed);

typedef struct spd_rng spd_rng;
spd_status spd_rng_create(uint64_t seed, spd_rng** out);
void spd_rng_destroy(spd_rng* rng);
/* Uniform real in (0,1]. */
spd_status spd_rng_uniform(spd_rng* rng, double* out);
/* Exponential variate with the given mean (mean > 0). */
spd_status spd_rng_exponential(spd_rng* rng, double mean, double* out);

/* ---------- detector model ---------- */
typedef struct spd_detector spd_detector;

spd_status spd_detector_create(double photon_rate_hz, double afterpulse_prob,
                               double afterpulse_tau_ns, spd_detector** out);
/* name: "d0" (0.047, 33 ns) or "d1" (0.043, 40 ns). */
spd_status spd_detector_create_preset(const char* name, double photon_rate_hz,
                                      spd_detector** out);
spd_status spd_detector_set_rate(spd_detector* det, double photon_rate_hz);
spd_status spd_detector_set_dead_time_constant(spd_detector* det, double dead_ns);
spd_status spd_detector_set_dead_time_ramp(spd_detector* det, double base_ns, double knee_hz,
                                           double max_hz, double max_ns);
/* name: "sim1" (20 ns), "sim2" (13.8 ns), "sim3" (13.8->16.8 ns ramp). */
spd_status spd_detector_set_dead_time_preset(spd_detector* det, const char* name);
void spd_detector_destroy(spd_detector* det);

spd_status spd_detector_effective_dead_time(const spd_detector* det, double f_hz,
                                            double* out_ns);
/* Closed-form mean inter-pulse interval at the given dead time. */
spd_status spd_detector_expected_interval(const spd_detector* det, double dead_ns,
                                          double* out_ns);
/* Photo-electron rate whose mean output rate equals target_output_hz. */
spd_status spd_detector_calibrate_input_rate(const spd_detector* det, double dead_ns,
                                             double target_output_hz, double rel_tol,
                                             double* out_hz);

/* ---------- pulse trains ---------- */
typedef struct spd_train spd_train;

spd_status spd_train_generate_n(const spd_detector* det, uint64_t n_pulses, uint64_t seed,
                                spd_train** out);
spd_status spd_train_generate_duration(const spd_detector* det, double duration_ns,
                                       uint64_t seed, spd_train** out);
uint64_t spd_train_size(const spd_train* train);
/* Borrowed pointer, valid until the train is destroyed. Timestamps in ns. */
const double* spd_train_timestamps(const spd_train* train);
uint64_t spd_train_afterpulse_count(const spd_train* train);
uint64_t spd_train_photon_count(const spd_train* train);
double spd_train_dead_time_ns(const spd_train* train);
double spd_train_photon_rate_hz(const spd_train* train);
spd_status spd_train_save(const spd_train* train, const char* path);
spd_status spd_train_load(const char* path, spd_train** out);
void spd_train_destroy(spd_train* train);

/* ---------- bit resolver ---------- */
typedef struct spd_bits spd_bits;

/* Merge two trains into bits: 0 when detector 0 fires alone, 1 when
 * detector 1 fires alone, nothing when they overlap within the window. */
spd_status spd_resolve(const spd_train* train0, const spd_train* train1,
                       double coincidence_window_ns, spd_bits** out);
/* Streamed end-to-end generation of exactly n_bits resolved bits from two
 * detector models, seeded with spd_derive_seed(seed, 0) and (seed, 1). */
spd_status spd_generate_bits(const spd_detector* det0, const spd_detector* det1,
                             double coincidence_window_ns, uint64_t n_bits, uint64_t seed,
                             spd_bits** out);
uint64_t spd_bits_size(const spd_bits* bits);
uint64_t spd_bits_ones(const spd_bits* bits);
uint64_t spd_bits_zeros(const spd_bits* bits);
uint64_t spd_bits_coincidences(const spd_bits* bits);
/* 0 or 1; -1 when index is out of range. */
int spd_bits_get(const spd_bits* bits, uint64_t index);
spd_status spd_bits_save(const spd_bits* bits, const char* path);
spd_status spd_bits_load(const char* path, spd_bits** out);
void spd_bits_destroy(spd_bits* bits);

/* ---------- statistics ---------- */
typedef struct spd_autocorr_result {
    uint32_t lag;
    double coefficient;
    double std_error;
    uint64_t n_bits;
} spd_autocorr_result;

spd_status spd_autocorrelation(const spd_bits* bits, uint32_t lag, spd_autocorr_result* out);
spd_status spd_rms_error(const double* a, const double* b, size_t n, double* out);

/* Interarrival histogram with optional background subtraction and
 * afterpulse fit. */
typedef struct spd_hist spd_hist;

spd_status spd_histogram(const spd_train* train, double bin_width_ns, double t_max_ns,
                         spd_hist** out);
spd_status spd_hist_subtract_background(spd_hist* hist, double photon_rate_hz);
size_t spd_hist_n_bins(const spd_hist* hist);
double spd_hist_bin_width_ns(const spd_hist* hist);
spd_status spd_hist_bin(const spd_hist* hist, size_t index, double* out_start_ns,
                        double* out_count, double* out_background, double* out_residual);
/* format: "csv" or "json-lines". */
spd_status spd_hist_save(const spd_hist* hist, const char* path, const char* format);
void spd_hist_destroy(spd_hist* hist);

typedef struct spd_afterpulse_fit {
    double tau_ns;
    double tau_stderr_ns;
    double amplitude;        /* fitted counts per bin at t = 0 */
    double afterpulse_prob;  /* full exponential integrated per interval */
    double window_lo_ns;
    double window_hi_ns;
    double chi2_per_dof;
    uint64_t n_bins_used;
} spd_afterpulse_fit;

/* Requires spd_hist_subtract_background first. Pass window_hi_ns <=
 * window_lo_ns to use the default window [dead+5, dead+5*tau_guess]. */
spd_status spd_fit_afterpulse(const spd_hist* hist, double dead_ns, double window_lo_ns,
                              double window_hi_ns, double tau_guess_ns,
                              spd_afterpulse_fit* out);

/* ---------- sweep harness ---------- */
typedef struct spd_run_config spd_run_config;

/* sim_preset: "sim1" | "sim2" | "sim3"; d0/d1 detectors, 12 ns window,
 * the bundled 14-point frequency grid, direct rate mode. */
spd_status spd_config_preset(const char* sim_preset, spd_run_config** out);
/* TOML-style config file with [detector0] [detector1] [resolver] [run]. */
spd_status spd_config_load(const char* path, spd_run_config** out);
spd_status spd_config_set_seed(spd_run_config* cfg, uint64_t master_seed);
spd_status spd_config_set_bits_per_point(spd_run_config* cfg, uint64_t n_bits);
/* mode: "direct" | "calibrated". */
spd_status spd_config_set_rate_mode(spd_run_config* cfg, const char* mode);
spd_status spd_config_set_window(spd_run_config* cfg, double coincidence_window_ns);
spd_status spd_config_set_frequencies(spd_run_config* cfg, const double* freqs_hz, size_t n);
/* which: 0 or 1. Copies the detector's parameters into the config. */
spd_status spd_config_set_detector(spd_run_config* cfg, int which, const spd_detector* det);
void spd_config_destroy(spd_run_config* cfg);

typedef struct spd_sweep spd_sweep;

typedef struct spd_sweep_row {
    double frequency_hz;
    double autocorr;
    double std_error;
    uint64_t n_bits;
    uint64_t n_coincidences;
    double rate_d0_hz; /* realized detector output rates */
    double rate_d1_hz;
} spd_sweep_row;

/* Deterministic parallel sweep; threads = 0 means hardware concurrency.
 * The thread count never changes the results. */
spd_status spd_sweep_run(const spd_run_config* cfg, int threads, spd_sweep** out);
size_t spd_sweep_size(const spd_sweep* sweep);
spd_status spd_sweep_row_get(const spd_sweep* sweep, size_t index, spd_sweep_row* out);
/* format: "csv" or "json-lines". */
spd_status spd_sweep_save(const spd_sweep* sweep, const char* path, const char* format);
spd_status spd_sweep_load_csv(const char* path, spd_sweep** out);
void spd_sweep_destroy(spd_sweep* sweep);

/* RMS difference against a bundled column ("meas"|"sim1"|"sim2"|"sim3");
 * requires the sweep to cover the bundled frequency grid. */
spd_status spd_sweep_r_vs(const spd_sweep* sweep, const char* column, double* out_r);
/* Per-point comparison table written to out_path (pass NULL to skip the
 * file and only get the R value). */
spd_status spd_compare_to_reference(const spd_sweep* sweep, const char* column,
                                    const char* out_path, const char* format, double* out_r);

/* ---------- bundled reference table ---------- */
size_t spd_reference_rows(void);
spd_status spd_reference_row_get(size_t index, double* out_frequency_hz, double* out_a_meas,
                                 double* out_meas_error, double* out_a_sim1, double* out_a_sim2,
                                 double* out_a_sim3);
double spd_reference_sim_error(void);
spd_status spd_reference_save_csv(const char* path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SPDSIM_H */
