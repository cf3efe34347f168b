#include "stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>

namespace spd {

namespace {

std::vector<std::uint64_t> pack_words(const BitStream& bits) {
    const auto& bytes = bits.bytes();
    std::vector<std::uint64_t> words((bits.size() + 63) / 64, 0);
    if (!bytes.empty())
        std::memcpy(words.data(), bytes.data(), bytes.size());
    return words;
}

std::uint64_t popcount_range(const std::vector<std::uint64_t>& words, std::uint64_t lo,
                             std::uint64_t hi) {
    std::uint64_t count = 0;
    for (std::uint64_t w = lo / 64; w * 64 < hi; ++w) {
        std::uint64_t word = words[w];
        const std::uint64_t base = w * 64;
        if (base < lo)
            word &= ~0ull << (lo - base);
        if (base + 64 > hi) {
            const std::uint64_t valid = hi - base;
            word &= (valid == 64) ? ~0ull : ((1ull << valid) - 1ull);
        }
        count += std::popcount(word);
    }
    return count;
}

} // namespace

AutocorrResult serial_autocorrelation(const BitStream& bits, std::uint32_t lag) {
    const std::uint64_t n = bits.size();
    if (lag == 0)
        throw_invalid("autocorrelation lag must be >= 1");
    if (n < static_cast<std::uint64_t>(lag) + 2)
        throw_invalid("bit sequence too short for requested lag");
    const std::uint64_t ones = bits.n_ones();
    if (ones == 0 || ones == n)
        throw_numeric("autocorrelation undefined for a constant bit sequence");

    const auto words = pack_words(bits);
    const std::uint64_t limit = n - lag; // number of (i, i+lag) pairs
    const std::uint64_t word_shift = lag / 64;
    const unsigned bit_shift = lag % 64;
    const std::size_t n_words = words.size();

    std::uint64_t cross = 0;
    for (std::uint64_t j = 0; j * 64 < limit; ++j) {
        const std::uint64_t idx = j + word_shift;
        const std::uint64_t lo = idx < n_words ? words[idx] : 0;
        const std::uint64_t hi = idx + 1 < n_words ? words[idx + 1] : 0;
        const std::uint64_t shifted = bit_shift == 0 ? lo : (lo >> bit_shift) | (hi << (64 - bit_shift));
        std::uint64_t both = words[j] & shifted;
        const std::uint64_t base = j * 64;
        if (base + 64 > limit) {
            const std::uint64_t valid = limit - base;
            both &= (valid == 64) ? ~0ull : ((1ull << valid) - 1ull);
        }
        cross += std::popcount(both);
    }

    const double mean = static_cast<double>(ones) / static_cast<double>(n);
    const double ones_head = static_cast<double>(ones - popcount_range(words, limit, n));
    const double ones_tail = static_cast<double>(ones - popcount_range(words, 0, lag));
    const double num = static_cast<double>(cross) - mean * (ones_head + ones_tail) +
                       static_cast<double>(limit) * mean * mean;
    const double den = static_cast<double>(n) * mean * (1.0 - mean);

    AutocorrResult r;
    r.lag = lag;
    r.coefficient = num / den;
    r.std_error = 1.0 / std::sqrt(static_cast<double>(limit));
    r.n_bits = n;
    return r;
}

double rms_error(std::span<const double> sim, std::span<const double> meas) {
    if (sim.size() != meas.size())
        throw_invalid("rms_error: column length mismatch");
    if (sim.empty())
        throw_invalid("rms_error: empty columns");
    double sum = 0.0;
    for (std::size_t i = 0; i < sim.size(); ++i) {
        const double d = sim[i] - meas[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(sim.size()));
}

IntervalHistogram interarrival_histogram(std::span<const double> timestamps_ns,
                                         double bin_width_ns, double t_max_ns) {
    if (timestamps_ns.size() < 2)
        throw_invalid("histogram requires at least 2 pulses");
    if (!(bin_width_ns > 0.0) || !(t_max_ns > 0.0))
        throw_invalid("histogram requires positive bin width and range");

    IntervalHistogram h;
    h.bin_width_ns = bin_width_ns;
    h.t_min_ns = 0.0;
    const auto n_bins = static_cast<std::size_t>(std::ceil(t_max_ns / bin_width_ns));
    h.counts.assign(n_bins, 0);
    h.total_intervals = timestamps_ns.size() - 1;
    for (std::size_t i = 1; i < timestamps_ns.size(); ++i) {
        const double gap = timestamps_ns[i] - timestamps_ns[i - 1];
        const auto bin = static_cast<std::size_t>(gap / bin_width_ns);
        if (gap >= 0.0 && bin < n_bins)
            ++h.counts[bin];
    }
    return h;
}

IntervalHistogram interarrival_histogram(const PulseTrain& train, double bin_width_ns,
                                         double t_max_ns) {
    return interarrival_histogram(std::span<const double>(train.timestamps_ns), bin_width_ns,
                                  t_max_ns);
}

ResidualHistogram subtract_background(const IntervalHistogram& hist, double photon_rate_hz,
                                      double tail_fraction) {
    if (!(photon_rate_hz > 0.0))
        throw_invalid("subtract_background: photon rate must be positive");
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
        throw_invalid("subtract_background: tail fraction must be in (0,1)");
    const std::size_t n_bins = hist.n_bins();
    const auto tail_start = static_cast<std::size_t>(
        std::floor(static_cast<double>(n_bins) * (1.0 - tail_fraction)));
    if (n_bins - tail_start < 20)
        throw_invalid("subtract_background: tail region needs at least 20 bins");

    ResidualHistogram out;
    out.hist = hist;
    out.background_tau_ns = 1e9 / photon_rate_hz;

    // One-parameter least squares of counts against exp(-t/s) over the tail.
    double sum_cg = 0.0;
    double sum_gg = 0.0;
    for (std::size_t i = tail_start; i < n_bins; ++i) {
        const double g = std::exp(-hist.bin_center_ns(i) / out.background_tau_ns);
        sum_cg += static_cast<double>(hist.counts[i]) * g;
        sum_gg += g * g;
    }
    double amplitude = sum_gg > 0.0 ? sum_cg / sum_gg : 0.0;
    amplitude = std::max(amplitude, 0.0);
    out.background_amplitude = amplitude;

    out.background.resize(n_bins);
    out.residual.resize(n_bins);
    for (std::size_t i = 0; i < n_bins; ++i) {
        out.background[i] = amplitude * std::exp(-hist.bin_center_ns(i) / out.background_tau_ns);
        out.residual[i] = static_cast<double>(hist.counts[i]) - out.background[i];
    }
    return out;
}

AfterpulseFit fit_afterpulse(const ResidualHistogram& res, double dead_ns,
                             std::optional<FitWindow> window, double tau_guess_ns) {
    if (!(dead_ns >= 0.0))
        throw_invalid("fit_afterpulse: dead time must be >= 0");
    if (!(tau_guess_ns > 0.0))
        throw_invalid("fit_afterpulse: tau guess must be positive");
    FitWindow w = window.value_or(FitWindow{dead_ns + 5.0, dead_ns + 5.0 * tau_guess_ns});
    if (!(w.lo_ns < w.hi_ns))
        throw_invalid("fit_afterpulse: empty fit window");

    // The log-linear Poisson approximation breaks down for near-empty bins,
    // and keeping bins on their *observed* counts would keep only upward
    // fluctuations in the tail and flatten the slope. Bootstrap pass: fit
    // on clearly populated bins. Refinement pass: select and weight bins by
    // the bootstrap model, with the first-order ln bias correction.
    constexpr double kMinFitCounts = 10.0;

    const IntervalHistogram& hist = res.hist;

    struct LineFit {
        double slope, intercept, delta, sw, chi2;
        std::size_t n;
    };
    const auto weighted_line = [&](auto&& include_weight_y) -> LineFit {
        double sw = 0.0, swx = 0.0, swy = 0.0, swxx = 0.0, swxy = 0.0;
        std::size_t n = 0;
        for (std::size_t i = 0; i < hist.n_bins(); ++i) {
            const double t = hist.bin_center_ns(i);
            if (t < w.lo_ns || t > w.hi_ns)
                continue;
            double weight = 0.0, y = 0.0;
            if (!include_weight_y(i, t, weight, y))
                continue;
            sw += weight;
            swx += weight * t;
            swy += weight * y;
            swxx += weight * t * t;
            swxy += weight * t * y;
            ++n;
        }
        if (n < 10)
            throw_fit("fit_afterpulse: fewer than 10 usable bins in the fit window");
        const double delta = sw * swxx - swx * swx;
        if (!(delta > 0.0))
            throw_fit("fit_afterpulse: degenerate fit system");
        LineFit f;
        f.slope = (sw * swxy - swx * swy) / delta;
        f.intercept = (swxx * swy - swx * swxy) / delta;
        f.delta = delta;
        f.sw = sw;
        f.n = n;
        f.chi2 = 0.0;
        for (std::size_t i = 0; i < hist.n_bins(); ++i) {
            const double t = hist.bin_center_ns(i);
            if (t < w.lo_ns || t > w.hi_ns)
                continue;
            double weight = 0.0, y = 0.0;
            if (!include_weight_y(i, t, weight, y))
                continue;
            const double dy = y - (f.intercept + f.slope * t);
            f.chi2 += weight * dy * dy;
        }
        return f;
    };

    const LineFit boot = weighted_line([&](std::size_t i, double, double& weight, double& y) {
        const double r = res.residual[i];
        if (!(r >= kMinFitCounts))
            return false;
        weight = r;
        y = std::log(r);
        return true;
    });
    if (!(boot.slope < 0.0))
        throw_fit("fit_afterpulse: no exponential decay in the fit window");

    const double boot_tau = -1.0 / boot.slope;
    const double boot_amp = std::exp(boot.intercept);
    const LineFit line = weighted_line([&](std::size_t i, double t, double& weight, double& y) {
        const double model = boot_amp * std::exp(-t / boot_tau);
        const double r = res.residual[i];
        if (!(model >= kMinFitCounts) || !(r > 0.0))
            return false;
        // counts variance = afterpulse model + photon background
        const double variance = model + std::max(res.background[i], 0.0);
        weight = model * model / variance;
        y = std::log(r) + variance / (2.0 * model * model);
        return true;
    });
    if (!(line.slope < 0.0))
        throw_fit("fit_afterpulse: no exponential decay in the fit window");

    AfterpulseFit fit;
    fit.window = w;
    fit.n_bins_used = line.n;
    fit.tau_ns = -1.0 / line.slope;
    if (!(fit.tau_ns <= 5.0 * (w.hi_ns - w.lo_ns)))
        throw_fit("fit_afterpulse: decay not resolved within the fit window");
    fit.amplitude = std::exp(line.intercept);
    fit.chi2_per_dof = line.n > 2 ? line.chi2 / static_cast<double>(line.n - 2) : 0.0;

    // slope error from the weight matrix, inflated when the fit scatter
    // exceeds the nominal weights
    const double slope_err =
        std::sqrt(line.sw / line.delta) * std::max(1.0, std::sqrt(fit.chi2_per_dof));
    fit.tau_stderr_ns = slope_err * fit.tau_ns * fit.tau_ns;

    fit.afterpulse_prob =
        fit.amplitude * fit.tau_ns / (hist.bin_width_ns * static_cast<double>(hist.total_intervals));
    if (!std::isfinite(fit.afterpulse_prob) || fit.afterpulse_prob >= 1.0)
        throw_fit("fit_afterpulse: fitted afterpulse probability out of range");
    return fit;
}

} // namespace spd
