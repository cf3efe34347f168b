#include "detector.hpp"

#include <cmath>
#include <limits>

namespace spd {

DeadTimeModel DeadTimeModel::constant(double dead_ns) {
    DeadTimeModel m;
    m.kind = Kind::Constant;
    m.base_ns = dead_ns;
    m.validate();
    return m;
}

DeadTimeModel DeadTimeModel::rate_ramp(double base_ns, double knee_hz, double max_hz, double max_ns) {
    DeadTimeModel m;
    m.kind = Kind::RateRamp;
    m.base_ns = base_ns;
    m.knee_hz = knee_hz;
    m.max_hz = max_hz;
    m.max_ns = max_ns;
    m.validate();
    return m;
}

DeadTimeModel DeadTimeModel::preset(const std::string& name) {
    if (name == "sim1")
        return constant(20.0);
    if (name == "sim2")
        return constant(13.8);
    if (name == "sim3")
        return rate_ramp(13.8, 5e6, 10e6, 16.8);
    throw_invalid("unknown dead-time preset '" + name + "' (expected sim1|sim2|sim3)");
}

void DeadTimeModel::validate() const {
    if (kind == Kind::Constant) {
        if (!(base_ns >= 0.0) || !std::isfinite(base_ns))
            throw_invalid("dead time must be finite and >= 0");
        return;
    }
    if (!(base_ns >= 0.0) || !std::isfinite(base_ns))
        throw_invalid("ramp base dead time must be finite and >= 0");
    if (!(max_ns >= base_ns))
        throw_invalid("ramp max dead time must be >= base dead time");
    if (!(knee_hz > 0.0) || !(max_hz > knee_hz))
        throw_invalid("ramp requires 0 < knee frequency < max frequency");
}

double DeadTimeModel::effective_ns(double f_hz) const {
    if (kind == Kind::Constant)
        return base_ns;
    if (f_hz <= knee_hz)
        return base_ns;
    if (f_hz >= max_hz)
        return max_ns;
    const double x = (f_hz - knee_hz) / (max_hz - knee_hz);
    return base_ns + x * (max_ns - base_ns);
}

DetectorParams DetectorParams::preset(const std::string& name, double photon_rate_hz,
                                      DeadTimeModel dead_time) {
    DetectorParams p;
    p.photon_rate_hz = photon_rate_hz;
    p.dead_time = dead_time;
    if (name == "d0") {
        p.afterpulse_prob = 0.047;
        p.afterpulse_tau_ns = 33.0;
    } else if (name == "d1") {
        p.afterpulse_prob = 0.043;
        p.afterpulse_tau_ns = 40.0;
    } else {
        throw_invalid("unknown detector preset '" + name + "' (expected d0|d1)");
    }
    p.validate();
    return p;
}

void DetectorParams::validate() const {
    if (!(photon_rate_hz > 0.0) || !std::isfinite(photon_rate_hz))
        throw_invalid("photon_rate_hz must be positive");
    if (!(afterpulse_tau_ns > 0.0) || !std::isfinite(afterpulse_tau_ns))
        throw_invalid("afterpulse_tau_ns must be positive");
    if (!(afterpulse_prob >= 0.0 && afterpulse_prob < 1.0))
        throw_invalid("afterpulse_prob must be in [0,1)");
    dead_time.validate();
}

double photon_branch_interval(const DetectorParams& params, Rng& rng, double dead_ns) {
    const double mean_gap_ns = 1e9 / params.photon_rate_hz;
    double t = 0.0;
    do {
        t += rng.exponential(mean_gap_ns);
    } while (t < dead_ns);
    return t;
}

PulseInterval next_pulse_interval(const DetectorParams& params, Rng& rng, double dead_ns) {
    // Afterpulse branch first: a short afterpulse is absorbed by the dead
    // time and falls through to the photo-electron loop.
    if (rng.uniform() <= params.afterpulse_prob) {
        const double dt = rng.exponential(params.afterpulse_tau_ns);
        if (dt >= dead_ns)
            return {dt, PulseKind::Afterpulse};
    }
    return {photon_branch_interval(params, rng, dead_ns), PulseKind::Photon};
}

double afterpulse_fraction(const DetectorParams& params, double dead_ns) {
    return params.afterpulse_prob * std::exp(-dead_ns / params.afterpulse_tau_ns);
}

double train_afterpulse_fraction(const DetectorParams& params, double dead_ns) {
    const double q = afterpulse_fraction(params, dead_ns);
    return q / (1.0 + q);
}

double train_expected_interval_ns(const DetectorParams& params, double dead_ns) {
    const double pi_ap = train_afterpulse_fraction(params, dead_ns);
    const double photon_mean = dead_ns + 1e9 / params.photon_rate_hz;
    return (1.0 - pi_ap) * expected_interval_ns(params, dead_ns) + pi_ap * photon_mean;
}

double expected_interval_ns(const DetectorParams& params, double dead_ns) {
    params.validate();
    if (!(dead_ns >= 0.0))
        throw_invalid("dead_ns must be >= 0");
    const double q = afterpulse_fraction(params, dead_ns);
    const double photon_mean = dead_ns + 1e9 / params.photon_rate_hz;
    const double afterpulse_mean = dead_ns + params.afterpulse_tau_ns;
    return q * afterpulse_mean + (1.0 - q) * photon_mean;
}

DetectorStream::DetectorStream(const DetectorParams& params, std::uint64_t seed,
                               std::optional<double> dead_override)
    : params_(params), rng_(seed) {
    params_.validate();
    dead_ns_ = dead_override.value_or(params_.dead_time.effective_ns(params_.photon_rate_hz));
    if (!(dead_ns_ >= 0.0))
        throw_invalid("effective dead time must be >= 0");
}

double DetectorStream::next_timestamp_ns() {
    PulseInterval iv{};
    do {
        // The trapped carrier causing an afterpulse is released by the
        // afterpulse avalanche itself, so an afterpulse pulse does not get
        // its own afterpulse chance; the next interval is photo-electron
        // accumulation only.
        if (last_was_afterpulse_)
            iv = {photon_branch_interval(params_, rng_, dead_ns_), PulseKind::Photon};
        else
            iv = next_pulse_interval(params_, rng_, dead_ns_);
    } while (iv.dt_ns == 0.0); // keep timestamps strictly increasing when dead time is 0
    last_was_afterpulse_ = iv.kind == PulseKind::Afterpulse;
    double t_next = t_ns_ + iv.dt_ns;
    // Accumulation can round the timestamp difference below the drawn
    // interval; nudge up so gaps never undercut the dead time.
    while (t_next - t_ns_ < dead_ns_ || t_next <= t_ns_)
        t_next = std::nextafter(t_next, std::numeric_limits<double>::infinity());
    t_ns_ = t_next;
    ++n_pulses_;
    if (iv.kind == PulseKind::Afterpulse)
        ++n_afterpulses_;
    return t_ns_;
}

double DetectorStream::realized_rate_hz() const {
    if (n_pulses_ == 0 || t_ns_ <= 0.0)
        return 0.0;
    return static_cast<double>(n_pulses_) * 1e9 / t_ns_;
}

PulseTrain generate_pulse_train_n(const DetectorParams& params, std::uint64_t n_pulses,
                                  std::uint64_t seed, std::optional<double> dead_override) {
    DetectorStream stream(params, seed, dead_override);
    PulseTrain train;
    train.params = params;
    train.dead_time_ns = stream.dead_time_ns();
    train.timestamps_ns.reserve(n_pulses);
    for (std::uint64_t i = 0; i < n_pulses; ++i)
        train.timestamps_ns.push_back(stream.next_timestamp_ns());
    train.afterpulse_count = stream.afterpulse_count();
    train.photon_count = stream.photon_count();
    return train;
}

PulseTrain generate_pulse_train_for(const DetectorParams& params, double duration_ns,
                                    std::uint64_t seed, std::optional<double> dead_override) {
    if (!(duration_ns >= 0.0))
        throw_invalid("duration_ns must be >= 0");
    DetectorStream stream(params, seed, dead_override);
    PulseTrain train;
    train.params = params;
    train.dead_time_ns = stream.dead_time_ns();
    std::uint64_t afterpulses = 0;
    std::uint64_t pulses = 0;
    while (true) {
        const std::uint64_t ap_before = stream.afterpulse_count();
        const double t = stream.next_timestamp_ns();
        if (t > duration_ns)
            break;
        train.timestamps_ns.push_back(t);
        ++pulses;
        afterpulses += stream.afterpulse_count() - ap_before;
    }
    train.afterpulse_count = afterpulses;
    train.photon_count = pulses - afterpulses;
    return train;
}

} // namespace spd
