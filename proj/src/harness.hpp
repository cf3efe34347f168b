#ifndef SPDSIM_HARNESS_HPP
#define SPDSIM_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "detector.hpp"
#include "reference_table.hpp"
#include "resolver.hpp"
#include "stats.hpp"

namespace spd {

enum class RateMode {
    Direct,     ///< grid frequency is fed straight to the detector model
    Calibrated, ///< photo-electron rate solved so the detector output rate hits the grid frequency
};

RateMode rate_mode_from_name(const std::string& name);
const char* rate_mode_name(RateMode mode);

struct RunConfig {
    DetectorParams detector0;
    DetectorParams detector1;
    ResolverConfig resolver;
    std::vector<double> frequencies_hz; ///< positive, sorted ascending
    std::uint64_t n_bits_per_point = 10'000'000;
    std::uint64_t master_seed = 1;
    RateMode rate_mode = RateMode::Direct;

    void validate() const;
};

/// Full sim1/sim2/sim3 configuration: d0/d1 afterpulse parameters, the
/// named dead-time model, 12 ns coincidence window, and the 14-point
/// reference frequency grid.
RunConfig preset_run_config(const std::string& sim_preset);

struct PointResult {
    double frequency_hz = 0.0;
    AutocorrResult autocorr;
    std::uint64_t n_coincidences = 0;
    double rate_d0_hz = 0.0; ///< realized detector output rates
    double rate_d1_hz = 0.0;
    double input_rate_d0_hz = 0.0; ///< photo-electron rates actually fed in
    double input_rate_d1_hz = 0.0;
    double dead_d0_ns = 0.0;
    double dead_d1_ns = 0.0;
};

/// One frequency point: detector streams seeded with derive_seed(master,
/// 2*index) and (master, 2*index+1), chunked generation until the resolver
/// has emitted n_bits_per_point bits (trailing chunk discarded), lag-1
/// autocorrelation over exactly that many bits.
PointResult run_point(const RunConfig& cfg, double f_hz, std::size_t point_index);

/// Photo-electron rate x such that the detector's mean output rate equals
/// target_output_hz at the given dead time, solved by bisection on the
/// closed-form expected interval. Verified to rel_tol on the output rate.
double calibrate_input_rate(const DetectorParams& params, double dead_ns,
                            double target_output_hz, double rel_tol = 1e-3);

/// Per-row comparison against the bundled reference grid, attached to sweep
/// reports whose frequency list matches it.
struct GridComparison {
    std::vector<double> ratio_vs_meas; ///< a_run / a_meas per row
    double r_vs_meas = 0.0;
    double r_vs_sim1 = 0.0;
    double r_vs_sim2 = 0.0;
    double r_vs_sim3 = 0.0;
};

struct SweepReport {
    std::vector<PointResult> rows;
    std::uint64_t master_seed = 1;
    RateMode rate_mode = RateMode::Direct;
    std::optional<GridComparison> vs_reference;

    std::vector<double> autocorr_column() const;
};

/// Deterministic parallel sweep over cfg.frequencies_hz: every point's
/// outcome depends only on (config, master_seed, point index), so the
/// thread count cannot change any output. threads = 0 means hardware
/// concurrency.
SweepReport run_sweep(const RunConfig& cfg, int threads = 0);

/// True when the report's frequencies match the bundled reference grid.
bool matches_reference_grid(const SweepReport& report, const ReferenceTable& ref);

struct ComparisonRow {
    double frequency_hz;
    double a_run;
    double a_ref;
    double diff;
    double ratio;
    double zscore; ///< diff over combined standard errors
};

struct ComparisonReport {
    RefColumn column = RefColumn::Meas;
    std::vector<ComparisonRow> rows;
    double r_value = 0.0; ///< rms_error(run, reference column)
};

ComparisonReport compare_to_reference(const SweepReport& report, const ReferenceTable& ref,
                                      RefColumn column);

} // namespace spd

#endif
