#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

namespace spd {

RateMode rate_mode_from_name(const std::string& name) {
    if (name == "direct")
        return RateMode::Direct;
    if (name == "calibrated")
        return RateMode::Calibrated;
    throw_invalid("unknown rate mode '" + name + "' (expected direct|calibrated)");
}

const char* rate_mode_name(RateMode mode) {
    return mode == RateMode::Direct ? "direct" : "calibrated";
}

void RunConfig::validate() const {
    detector0.validate();
    detector1.validate();
    resolver.validate();
    if (n_bits_per_point < 10'000)
        throw_invalid("n_bits_per_point must be at least 10^4");
    for (double f : frequencies_hz)
        if (!(f > 0.0) || !std::isfinite(f))
            throw_invalid("sweep frequencies must be positive");
    if (!std::is_sorted(frequencies_hz.begin(), frequencies_hz.end()))
        throw_invalid("sweep frequencies must be sorted ascending");
}

RunConfig preset_run_config(const std::string& sim_preset) {
    const DeadTimeModel dead = DeadTimeModel::preset(sim_preset);
    RunConfig cfg;
    // Per-point rates overwrite photon_rate_hz; 1 MHz is just a valid filler.
    cfg.detector0 = DetectorParams::preset("d0", 1e6, dead);
    cfg.detector1 = DetectorParams::preset("d1", 1e6, dead);
    cfg.resolver.coincidence_window_ns = 12.0;
    cfg.frequencies_hz = reference_table().frequencies();
    return cfg;
}

double calibrate_input_rate(const DetectorParams& params, double dead_ns,
                            double target_output_hz, double rel_tol) {
    params.validate();
    if (!(target_output_hz > 0.0))
        throw_invalid("calibration target rate must be positive");
    if (!(rel_tol > 0.0))
        throw_invalid("calibration tolerance must be positive");
    if (dead_ns > 0.0 && target_output_hz >= 1e9 / dead_ns)
        throw_invalid("calibration target rate at or above dead-time saturation");

    const auto output_rate = [&](double input_hz) {
        DetectorParams p = params;
        p.photon_rate_hz = input_hz;
        return 1e9 / expected_interval_ns(p, dead_ns);
    };

    double lo = target_output_hz / 2.0;
    double hi = 100.0 * target_output_hz;
    if (output_rate(lo) > target_output_hz)
        lo = target_output_hz / 1e3; // afterpulses can push the output above a low input
    if (output_rate(hi) < target_output_hz)
        throw_invalid("calibration target rate not achievable");

    double mid = lo;
    for (int i = 0; i < 200; ++i) {
        mid = 0.5 * (lo + hi);
        const double out = output_rate(mid);
        if (std::abs(out - target_output_hz) <= rel_tol * target_output_hz)
            return mid;
        (out < target_output_hz ? lo : hi) = mid;
    }
    if (std::abs(output_rate(mid) - target_output_hz) <= rel_tol * target_output_hz)
        return mid;
    throw_numeric("rate calibration did not converge in 200 iterations");
}

namespace {

constexpr std::size_t kChunkPulses = 4096;

} // namespace

PointResult run_point(const RunConfig& cfg, double f_hz, std::size_t point_index) {
    cfg.validate();
    if (!(f_hz > 0.0))
        throw_invalid("run_point frequency must be positive");

    const double dead0 = cfg.detector0.dead_time.effective_ns(f_hz);
    const double dead1 = cfg.detector1.dead_time.effective_ns(f_hz);

    DetectorParams p0 = cfg.detector0;
    DetectorParams p1 = cfg.detector1;
    if (cfg.rate_mode == RateMode::Direct) {
        p0.photon_rate_hz = f_hz;
        p1.photon_rate_hz = f_hz;
    } else {
        p0.photon_rate_hz = calibrate_input_rate(p0, dead0, f_hz);
        p1.photon_rate_hz = calibrate_input_rate(p1, dead1, f_hz);
    }

    DetectorStream s0(p0, derive_seed(cfg.master_seed, 2 * point_index), dead0);
    DetectorStream s1(p1, derive_seed(cfg.master_seed, 2 * point_index + 1), dead1);
    StreamingResolver resolver(cfg.resolver);

    const std::uint64_t target_bits = cfg.n_bits_per_point;
    resolver.reserve_bits(target_bits);
    // A window wider than the typical pulse spacing can reject essentially
    // every pair; bail out instead of generating forever.
    const std::uint64_t max_pulses = 64 * target_bits + 1'000'000;
    std::vector<double> chunk(kChunkPulses);
    while (resolver.bits().size() < target_bits) {
        if (s0.pulse_count() + s1.pulse_count() > max_pulses)
            throw_numeric("run_point: coincidence window rejects nearly all pulses");
        // Refill whichever side the merge is starved on.
        const bool refill0 = resolver.wants0();
        DetectorStream& s = refill0 ? s0 : s1;
        for (auto& t : chunk)
            t = s.next_timestamp_ns();
        if (refill0)
            resolver.push0(chunk);
        else
            resolver.push1(chunk);
    }

    PointResult r;
    r.frequency_hz = f_hz;
    r.n_coincidences = resolver.n_coincidences();
    r.rate_d0_hz = s0.realized_rate_hz();
    r.rate_d1_hz = s1.realized_rate_hz();
    r.input_rate_d0_hz = p0.photon_rate_hz;
    r.input_rate_d1_hz = p1.photon_rate_hz;
    r.dead_d0_ns = dead0;
    r.dead_d1_ns = dead1;

    BitStream bits = resolver.take();
    bits.truncate(target_bits);
    r.autocorr = serial_autocorrelation(bits, 1);
    return r;
}

std::vector<double> SweepReport::autocorr_column() const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        out.push_back(r.autocorr.coefficient);
    return out;
}

bool matches_reference_grid(const SweepReport& report, const ReferenceTable& ref) {
    if (report.rows.size() != ref.rows.size())
        return false;
    for (std::size_t i = 0; i < ref.rows.size(); ++i)
        if (report.rows[i].frequency_hz != ref.rows[i].frequency_hz)
            return false;
    return true;
}

SweepReport run_sweep(const RunConfig& cfg, int threads) {
    cfg.validate();
    SweepReport report;
    report.master_seed = cfg.master_seed;
    report.rate_mode = cfg.rate_mode;
    const std::size_t n_points = cfg.frequencies_hz.size();
    report.rows.resize(n_points);
    if (n_points > 0) {
        std::size_t n_workers = threads > 0 ? static_cast<std::size_t>(threads)
                                            : std::max(1u, std::thread::hardware_concurrency());
        n_workers = std::min(n_workers, n_points);

        std::atomic<std::size_t> next{0};
        std::atomic<bool> failed{false};
        const auto worker = [&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n_points)
                    return;
                try {
                    report.rows[i] = run_point(cfg, cfg.frequencies_hz[i], i);
                } catch (...) {
                    failed.store(true);
                    throw;
                }
            }
        };

        if (n_workers <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            std::exception_ptr error;
            std::mutex error_mutex;
            pool.reserve(n_workers);
            for (std::size_t w = 0; w < n_workers; ++w)
                pool.emplace_back([&] {
                    try {
                        worker();
                    } catch (...) {
                        const std::lock_guard<std::mutex> lock(error_mutex);
                        if (!error)
                            error = std::current_exception();
                    }
                });
            for (auto& t : pool)
                t.join();
            if (error)
                std::rethrow_exception(error);
        }
    }

    const ReferenceTable& ref = reference_table();
    if (matches_reference_grid(report, ref)) {
        GridComparison cmp;
        const auto run = report.autocorr_column();
        cmp.ratio_vs_meas.reserve(run.size());
        for (std::size_t i = 0; i < run.size(); ++i)
            cmp.ratio_vs_meas.push_back(run[i] / ref.rows[i].a_meas);
        cmp.r_vs_meas = rms_error(run, ref.column(RefColumn::Meas));
        cmp.r_vs_sim1 = rms_error(run, ref.column(RefColumn::Sim1));
        cmp.r_vs_sim2 = rms_error(run, ref.column(RefColumn::Sim2));
        cmp.r_vs_sim3 = rms_error(run, ref.column(RefColumn::Sim3));
        report.vs_reference = cmp;
    }
    return report;
}

ComparisonReport compare_to_reference(const SweepReport& report, const ReferenceTable& ref,
                                      RefColumn column) {
    if (!matches_reference_grid(report, ref))
        throw_invalid("sweep report does not cover the reference frequency grid");
    ComparisonReport cmp;
    cmp.column = column;
    const auto ref_col = ref.column(column);
    cmp.rows.reserve(report.rows.size());
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const PointResult& p = report.rows[i];
        ComparisonRow row;
        row.frequency_hz = p.frequency_hz;
        row.a_run = p.autocorr.coefficient;
        row.a_ref = ref_col[i];
        row.diff = row.a_run - row.a_ref;
        row.ratio = row.a_run / row.a_ref;
        const double se_run = p.autocorr.std_error;
        const double se_ref = ref.row_error(column, i);
        row.zscore = row.diff / std::sqrt(se_run * se_run + se_ref * se_ref);
        cmp.rows.push_back(row);
    }
    cmp.r_value = rms_error(report.autocorr_column(), ref_col);
    return cmp;
}

} // namespace spd
