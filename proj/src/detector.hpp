#ifndef SPDSIM_DETECTOR_HPP
#define SPDSIM_DETECTOR_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rng.hpp"

namespace spd {

/// Dead time of the detector electronics, either a fixed value or a value
/// that grows linearly with detection rate between two corner frequencies
/// (the electronics cannot fully recharge between closely spaced pulses).
struct DeadTimeModel {
    enum class Kind { Constant, RateRamp };

    Kind kind = Kind::Constant;
    double base_ns = 0.0;
    // RateRamp only: base_ns below knee_hz, linear up to max_ns at max_hz,
    // clamped at max_ns beyond.
    double knee_hz = 0.0;
    double max_hz = 0.0;
    double max_ns = 0.0;

    static DeadTimeModel constant(double dead_ns);
    static DeadTimeModel rate_ramp(double base_ns, double knee_hz, double max_hz, double max_ns);

    /// Named electronics configurations: "sim1" = 20 ns constant (apparent
    /// dead time), "sim2" = 13.8 ns constant (twilight-adjusted effective
    /// dead time), "sim3" = 13.8 ns ramping to 16.8 ns between 5 and 10 MHz.
    static DeadTimeModel preset(const std::string& name);

    double effective_ns(double f_hz) const;
    void validate() const;
};

/// Physical model of one avalanche single-photon detector.
struct DetectorParams {
    double photon_rate_hz = 0.0;    ///< mean photo-electron rate fed to the detector
    double afterpulse_prob = 0.0;   ///< per-pulse afterpulse probability, in [0,1)
    double afterpulse_tau_ns = 1.0; ///< exponential afterpulse lifetime
    DeadTimeModel dead_time;

    /// Afterpulse parameters measured for the two hardware detectors:
    /// "d0" = (0.047, 33 ns), "d1" = (0.043, 40 ns).
    static DetectorParams preset(const std::string& name, double photon_rate_hz,
                                 DeadTimeModel dead_time = DeadTimeModel::constant(0.0));

    void validate() const;
};

enum class PulseKind : std::uint8_t { Photon = 0, Afterpulse = 1 };

struct PulseInterval {
    double dt_ns;
    PulseKind kind;
};

/// One inter-pulse interval of the detector model. With probability
/// afterpulse_prob an exponential afterpulse delay is drawn; if it clears
/// the dead time it is returned as-is. Otherwise photo-electron arrivals
/// are accumulated until the running sum clears the dead time. The result
/// is always >= dead_ns.
PulseInterval next_pulse_interval(const DetectorParams& params, Rng& rng, double dead_ns);

/// The photo-electron part of the interval draw alone.
double photon_branch_interval(const DetectorParams& params, Rng& rng, double dead_ns);

/// Closed-form mean of next_pulse_interval. With q = P_a * exp(-d/tau)
/// (the probability that the afterpulse branch returns), the mean is
/// q*(d + tau) + (1-q)*(d + 1e9/f) by memorylessness of both branches.
/// Serves as the independent oracle for the sampled interval distribution
/// and as the inner function of rate calibration.
double expected_interval_ns(const DetectorParams& params, double dead_ns);

/// Probability q that a single interval draw is returned by the afterpulse
/// branch: P_a * exp(-dead/tau).
double afterpulse_fraction(const DetectorParams& params, double dead_ns);

/// Stationary afterpulse fraction of a generated train, q/(1+q). Lower
/// than the per-draw q because an afterpulse pulse does not roll a new
/// afterpulse (see DetectorStream).
double train_afterpulse_fraction(const DetectorParams& params, double dead_ns);

/// Mean inter-pulse interval of a generated train: the per-draw mean mixed
/// with the photon-only mean for the q/(1+q) of calls that follow an
/// afterpulse.
double train_expected_interval_ns(const DetectorParams& params, double dead_ns);

struct PulseTrain {
    std::vector<double> timestamps_ns; ///< strictly increasing, gaps >= dead_time_ns
    DetectorParams params;
    double dead_time_ns = 0.0; ///< effective dead time the train was generated with
    std::uint64_t afterpulse_count = 0;
    std::uint64_t photon_count = 0;

    std::uint64_t size() const { return timestamps_ns.size(); }
};

/// Incremental pulse source for one detector; run_point draws from two of
/// these through the streaming resolver without materializing full trains.
/// Interval kinds follow next_pulse_interval, except that the call after
/// an afterpulse pulse skips the afterpulse roll (the trapped carrier is
/// spent), so afterpulses do not chain.
class DetectorStream {
public:
    /// dead_override pins the effective dead time for the whole run; by
    /// default it is resolved once from the configured photon rate.
    DetectorStream(const DetectorParams& params, std::uint64_t seed,
                   std::optional<double> dead_override = std::nullopt);

    double next_timestamp_ns();

    double current_time_ns() const { return t_ns_; }
    double dead_time_ns() const { return dead_ns_; }
    std::uint64_t pulse_count() const { return n_pulses_; }
    std::uint64_t afterpulse_count() const { return n_afterpulses_; }
    std::uint64_t photon_count() const { return n_pulses_ - n_afterpulses_; }

    /// Realized output rate over everything generated so far.
    double realized_rate_hz() const;

private:
    DetectorParams params_;
    Rng rng_;
    double dead_ns_ = 0.0;
    double t_ns_ = 0.0;
    bool last_was_afterpulse_ = false;
    std::uint64_t n_pulses_ = 0;
    std::uint64_t n_afterpulses_ = 0;
};

PulseTrain generate_pulse_train_n(const DetectorParams& params, std::uint64_t n_pulses,
                                  std::uint64_t seed,
                                  std::optional<double> dead_override = std::nullopt);

/// Pulses with timestamps <= duration_ns. Zero duration gives an empty train.
PulseTrain generate_pulse_train_for(const DetectorParams& params, double duration_ns,
                                    std::uint64_t seed,
                                    std::optional<double> dead_override = std::nullopt);

} // namespace spd

#endif
