#ifndef SPDSIM_STATS_HPP
#define SPDSIM_STATS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "detector.hpp"
#include "resolver.hpp"

namespace spd {

struct AutocorrResult {
    std::uint32_t lag = 1;
    double coefficient = 0.0;
    double std_error = 0.0; ///< 1/sqrt(N - lag)
    std::uint64_t n_bits = 0;
};

/// Lag-k serial (Pearson) autocorrelation with pooled-mean normalization:
///   a_k = sum_{i<N-k} (b_i - m)(b_{i+k} - m) / sum_{i<N} (b_i - m)^2.
/// Word-parallel over the packed stream. Requires N >= k + 2 and a
/// non-constant sequence.
AutocorrResult serial_autocorrelation(const BitStream& bits, std::uint32_t lag = 1);

/// Root mean square difference between two equal-length columns.
double rms_error(std::span<const double> sim, std::span<const double> meas);

struct IntervalHistogram {
    double bin_width_ns = 1.0;
    double t_min_ns = 0.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total_intervals = 0; ///< all consecutive gaps, including out-of-range ones

    std::size_t n_bins() const { return counts.size(); }
    double t_max_ns() const { return t_min_ns + bin_width_ns * static_cast<double>(counts.size()); }
    double bin_start_ns(std::size_t i) const { return t_min_ns + bin_width_ns * static_cast<double>(i); }
    double bin_center_ns(std::size_t i) const { return bin_start_ns(i) + 0.5 * bin_width_ns; }
};

/// Histogram of consecutive pulse-pair intervals, clipped to [0, t_max).
IntervalHistogram interarrival_histogram(const PulseTrain& train, double bin_width_ns,
                                         double t_max_ns);
IntervalHistogram interarrival_histogram(std::span<const double> timestamps_ns,
                                         double bin_width_ns, double t_max_ns);

/// Histogram with the Poissonian photon background removed. `residual`
/// keeps the raw (possibly negative) per-bin values used for fitting;
/// exports clamp at zero.
struct ResidualHistogram {
    IntervalHistogram hist;
    double background_amplitude = 0.0; ///< fitted counts at t = 0
    double background_tau_ns = 0.0;    ///< 1e9 / photon_rate_hz
    std::vector<double> background;
    std::vector<double> residual;
};

/// Least-squares fit of the histogram tail (by default the upper half of
/// the range, at least 20 bins) against B * exp(-t/s) with s fixed by the
/// photon rate, then subtraction of the fitted background from every bin.
ResidualHistogram subtract_background(const IntervalHistogram& hist, double photon_rate_hz,
                                      double tail_fraction = 0.5);

struct FitWindow {
    double lo_ns = 0.0;
    double hi_ns = 0.0;
};

struct AfterpulseFit {
    double tau_ns = 0.0;
    double tau_stderr_ns = 0.0;
    double amplitude = 0.0; ///< fitted counts per bin extrapolated to t = 0
    double afterpulse_prob = 0.0;
    FitWindow window;
    double chi2_per_dof = 0.0;
    std::size_t n_bins_used = 0;
};

/// Weighted least squares of ln(residual counts) vs t over the window
/// (weights = counts, Poisson approximation; bins under 10 counts are
/// excluded as the approximation fails there). The window defaults to
/// [dead + 5 ns, dead + 5 * tau_guess], skipping the twilight pile-up just
/// above the dead time. afterpulse_prob is the full fitted exponential
/// integrated per interval: amplitude * tau / (bin_width * total_intervals),
/// i.e. the per-pulse probability before dead-time truncation.
AfterpulseFit fit_afterpulse(const ResidualHistogram& res, double dead_ns,
                             std::optional<FitWindow> window = std::nullopt,
                             double tau_guess_ns = 40.0);

} // namespace spd

#endif
