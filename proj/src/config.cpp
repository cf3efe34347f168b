#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace spd {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

// Strips a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"')
            in_string = !in_string;
        else if (line[i] == '#' && !in_string)
            return line.substr(0, i);
    }
    return line;
}

bool parse_number(const std::string& s, double& out) {
    try {
        std::size_t used = 0;
        out = std::stod(s, &used);
        return used == s.size();
    } catch (const std::exception&) {
        return false;
    }
}

bool is_integer_literal(const std::string& s) {
    if (s.empty())
        return false;
    std::size_t i = (s[0] == '+' || s[0] == '-') ? 1 : 0;
    if (i == s.size())
        return false;
    return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(),
                       [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

ConfigValue parse_value(const std::string& raw, const std::string& origin, int line_no) {
    const std::string s = trim(raw);
    if (s.empty())
        throw_config(origin + ":" + std::to_string(line_no) + ": missing value");
    if (s.front() == '"') {
        if (s.size() < 2 || s.back() != '"')
            throw_config(origin + ":" + std::to_string(line_no) + ": unterminated string");
        return s.substr(1, s.size() - 2);
    }
    if (s == "true")
        return true;
    if (s == "false")
        return false;
    if (s.front() == '[') {
        if (s.back() != ']')
            throw_config(origin + ":" + std::to_string(line_no) + ": unterminated array");
        std::vector<double> values;
        std::string body = s.substr(1, s.size() - 2);
        std::istringstream ss(body);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty())
                continue;
            double v = 0.0;
            if (!parse_number(item, v))
                throw_config(origin + ":" + std::to_string(line_no) + ": bad array element '" +
                             item + "'");
            values.push_back(v);
        }
        return values;
    }
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        std::uint64_t v = 0;
        const auto [p, ec] = std::from_chars(s.data() + 2, s.data() + s.size(), v, 16);
        if (ec != std::errc() || p != s.data() + s.size())
            throw_config(origin + ":" + std::to_string(line_no) + ": bad hex literal '" + s + "'");
        return static_cast<std::int64_t>(v);
    }
    if (is_integer_literal(s)) {
        std::int64_t v = 0;
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc() && p == s.data() + s.size())
            return v;
        // fall through to float for out-of-range integers
    }
    double v = 0.0;
    if (parse_number(s, v))
        return v;
    throw_config(origin + ":" + std::to_string(line_no) + ": cannot parse value '" + s + "'");
}

} // namespace

std::uint64_t parse_seed(const std::string& text) {
    const std::string s = trim(text);
    if (s.empty())
        throw_config("empty seed value");
    std::uint64_t v = 0;
    if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
        const auto [p, ec] = std::from_chars(s.data() + 2, s.data() + s.size(), v, 16);
        if (ec != std::errc() || p != s.data() + s.size())
            throw_config("bad hex seed '" + s + "'");
        return v;
    }
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw_config("bad seed '" + s + "' (expected decimal or 0x-hex)");
    return v;
}

ConfigFile ConfigFile::parse_string(const std::string& text, const std::string& origin) {
    ConfigFile cfg;
    cfg.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(strip_comment(line));
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw_config(origin + ":" + std::to_string(line_no) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw_config(origin + ":" + std::to_string(line_no) + ": empty section name");
            cfg.sections_[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw_config(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string raw = trim(line.substr(eq + 1));
        if (key.empty())
            throw_config(origin + ":" + std::to_string(line_no) + ": empty key");
        cfg.sections_[section][key] = parse_value(raw, origin, line_no);
        cfg.raw_[section][key] = raw;
    }
    return cfg;
}

ConfigFile ConfigFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw_io("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path);
}

const ConfigValue* ConfigFile::find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end())
        return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

double ConfigFile::number(const std::string& section, const std::string& key,
                          double fallback) const {
    const ConfigValue* v = find(section, key);
    if (!v)
        return fallback;
    if (const auto* i = std::get_if<std::int64_t>(v))
        return static_cast<double>(*i);
    if (const auto* d = std::get_if<double>(v))
        return *d;
    throw_config(origin_ + ": key '" + section + "." + key + "' is not a number");
}

std::int64_t ConfigFile::integer(const std::string& section, const std::string& key,
                                 std::int64_t fallback) const {
    const ConfigValue* v = find(section, key);
    if (!v)
        return fallback;
    if (const auto* i = std::get_if<std::int64_t>(v))
        return *i;
    if (const auto* d = std::get_if<double>(v)) {
        const auto as_int = static_cast<std::int64_t>(*d);
        if (static_cast<double>(as_int) == *d)
            return as_int;
    }
    throw_config(origin_ + ": key '" + section + "." + key + "' is not an integer");
}

std::string ConfigFile::str(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    const ConfigValue* v = find(section, key);
    if (!v)
        return fallback;
    if (const auto* s = std::get_if<std::string>(v))
        return *s;
    throw_config(origin_ + ": key '" + section + "." + key + "' is not a string");
}

std::vector<double> ConfigFile::numbers(const std::string& section, const std::string& key) const {
    const ConfigValue* v = find(section, key);
    if (!v)
        return {};
    if (const auto* a = std::get_if<std::vector<double>>(v))
        return *a;
    if (const auto* i = std::get_if<std::int64_t>(v))
        return {static_cast<double>(*i)};
    if (const auto* d = std::get_if<double>(v))
        return {*d};
    throw_config(origin_ + ": key '" + section + "." + key + "' is not a numeric array");
}

std::uint64_t ConfigFile::seed(const std::string& section, const std::string& key,
                               std::uint64_t fallback) const {
    const auto s = raw_.find(section);
    if (s == raw_.end())
        return fallback;
    const auto k = s->second.find(key);
    if (k == s->second.end())
        return fallback;
    std::string raw = trim(k->second);
    if (!raw.empty() && raw.front() == '"' && raw.back() == '"' && raw.size() >= 2)
        raw = raw.substr(1, raw.size() - 2);
    return parse_seed(raw);
}

namespace {

DetectorParams detector_from_config(const ConfigFile& cfg, const std::string& section) {
    DetectorParams params;
    const std::string preset = cfg.str(section, "preset", "");
    if (!preset.empty())
        params = DetectorParams::preset(preset, 1e6);
    else
        params.photon_rate_hz = 1e6;

    params.photon_rate_hz = cfg.number(section, "photon_rate_hz", params.photon_rate_hz);
    params.afterpulse_prob = cfg.number(section, "afterpulse_prob", params.afterpulse_prob);
    params.afterpulse_tau_ns = cfg.number(section, "afterpulse_tau_ns", params.afterpulse_tau_ns);

    const std::string model = cfg.str(section, "dead_time_model", "constant");
    if (model == "constant") {
        params.dead_time = DeadTimeModel::constant(cfg.number(section, "dead_time_ns", 0.0));
    } else if (model == "ramp") {
        params.dead_time = DeadTimeModel::rate_ramp(
            cfg.number(section, "dead_time_ns", 0.0), cfg.number(section, "ramp_knee_hz", 0.0),
            cfg.number(section, "ramp_max_hz", 0.0), cfg.number(section, "ramp_dead_max_ns", 0.0));
    } else {
        params.dead_time = DeadTimeModel::preset(model);
        if (cfg.has(section, "dead_time_ns"))
            throw_config("config: dead_time_ns conflicts with dead-time preset '" + model + "'");
    }
    params.validate();
    return params;
}

RunConfig run_config_from(const ConfigFile& cfg) {
    RunConfig run;
    run.detector0 = detector_from_config(cfg, "detector0");
    run.detector1 = detector_from_config(cfg, "detector1");
    run.resolver.coincidence_window_ns =
        cfg.number("resolver", "coincidence_window_ns", run.resolver.coincidence_window_ns);
    run.frequencies_hz = cfg.numbers("run", "frequencies_hz");
    if (run.frequencies_hz.empty())
        run.frequencies_hz = reference_table().frequencies();
    run.n_bits_per_point = static_cast<std::uint64_t>(
        cfg.integer("run", "n_bits_per_point", static_cast<std::int64_t>(run.n_bits_per_point)));
    run.master_seed = cfg.seed("run", "master_seed", run.master_seed);
    run.rate_mode = rate_mode_from_name(cfg.str("run", "rate_mode", rate_mode_name(run.rate_mode)));
    run.validate();
    return run;
}

} // namespace

RunConfig load_run_config(const std::string& path) {
    return run_config_from(ConfigFile::parse_file(path));
}

RunConfig run_config_from_string(const std::string& text) {
    return run_config_from(ConfigFile::parse_string(text));
}

} // namespace spd
