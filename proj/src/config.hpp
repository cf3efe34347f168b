#ifndef SPDSIM_CONFIG_HPP
#define SPDSIM_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "harness.hpp"

namespace spd {

/// Parsed value of one config key: integer, float, string, boolean, or a
/// flat array of numbers.
using ConfigValue = std::variant<std::int64_t, double, std::string, bool, std::vector<double>>;

/// Minimal TOML-style table: `[section]` headers, `key = value` lines, `#`
/// comments. Covers the config grammar this project needs; nested tables
/// and dates are rejected.
class ConfigFile {
public:
    static ConfigFile parse_file(const std::string& path);
    static ConfigFile parse_string(const std::string& text, const std::string& origin = "<config>");

    bool has(const std::string& section, const std::string& key) const;
    double number(const std::string& section, const std::string& key, double fallback) const;
    std::int64_t integer(const std::string& section, const std::string& key,
                         std::int64_t fallback) const;
    std::string str(const std::string& section, const std::string& key,
                    const std::string& fallback) const;
    std::vector<double> numbers(const std::string& section, const std::string& key) const;

    /// Seed values additionally accept 0x-prefixed hex and full u64 range.
    std::uint64_t seed(const std::string& section, const std::string& key,
                       std::uint64_t fallback) const;

private:
    const ConfigValue* find(const std::string& section, const std::string& key) const;

    std::map<std::string, std::map<std::string, ConfigValue>> sections_;
    std::map<std::string, std::map<std::string, std::string>> raw_; // pre-parse text, for seeds
    std::string origin_;
};

/// Decimal or 0x-hex unsigned 64-bit seed.
std::uint64_t parse_seed(const std::string& text);

/// Build a RunConfig from a config file with sections [detector0],
/// [detector1], [resolver], [run]. Detector keys: photon_rate_hz,
/// afterpulse_prob, afterpulse_tau_ns, preset, dead_time_model
/// (constant|ramp|sim1|sim2|sim3), dead_time_ns, ramp_knee_hz, ramp_max_hz,
/// ramp_dead_max_ns. Run keys: frequencies_hz, n_bits_per_point,
/// master_seed, rate_mode. Resolver key: coincidence_window_ns.
RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_string(const std::string& text);

} // namespace spd

#endif
