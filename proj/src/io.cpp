#include "io.hpp"

#include <algorithm>
#include <bit>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

namespace spd {

namespace {

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class ByteReader {
public:
    ByteReader(const std::string& data, const std::string& path) : data_(data), path_(path) {}

    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(byte()) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(byte()) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    void bytes(void* dst, std::size_t n) {
        need(n);
        std::memcpy(dst, data_.data() + pos_, n);
        pos_ += n;
    }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    std::uint8_t byte() {
        need(1);
        return static_cast<std::uint8_t>(data_[pos_++]);
    }
    void need(std::size_t n) {
        if (data_.size() - pos_ < n)
            throw_io("truncated file: " + path_);
    }
    const std::string& data_;
    std::string path_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw_io("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (!in.good() && !in.eof())
        throw_io("read failed: " + path);
    return std::move(ss).str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw_io("cannot create " + path);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out)
        throw_io("write failed: " + path);
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double_field(const std::string& s, const std::string& path) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            throw_io("bad numeric field '" + s + "' in " + path);
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw_io("bad numeric field '" + s + "' in " + path);
    }
}

} // namespace

void write_bitstream(const std::string& path, const BitStream& bits) {
    std::string out;
    out.reserve(12 + bits.bytes().size());
    out += "SPB1";
    put_u64(out, bits.size());
    out.append(reinterpret_cast<const char*>(bits.bytes().data()), bits.bytes().size());
    write_file(path, out);
}

BitStream read_bitstream(const std::string& path) {
    const std::string data = read_file(path);
    ByteReader r(data, path);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, "SPB1", 4) != 0)
        throw_io("not a bitstream file (bad magic): " + path);
    const std::uint64_t n_bits = r.u64();
    const std::uint64_t n_bytes = (n_bits + 7) / 8;
    if (r.remaining() != n_bytes)
        throw_io("bitstream payload size mismatch: " + path);
    std::vector<std::uint8_t> bytes(n_bytes);
    if (n_bytes > 0)
        r.bytes(bytes.data(), n_bytes);
    return BitStream::from_bytes(std::move(bytes), n_bits);
}

void write_pulse_train(const std::string& path, const PulseTrain& train) {
    std::string out;
    out.reserve(64 + 8 * train.timestamps_ns.size());
    out += "SPT1";
    put_u32(out, 1);
    put_f64(out, train.params.photon_rate_hz);
    put_f64(out, train.params.afterpulse_prob);
    put_f64(out, train.params.afterpulse_tau_ns);
    put_f64(out, train.dead_time_ns);
    put_u64(out, train.afterpulse_count);
    put_u64(out, train.photon_count);
    put_u64(out, train.size());
    for (double t : train.timestamps_ns)
        put_f64(out, t);
    write_file(path, out);
}

PulseTrain read_pulse_train(const std::string& path) {
    const std::string data = read_file(path);
    ByteReader r(data, path);
    char magic[4];
    r.bytes(magic, 4);
    if (std::memcmp(magic, "SPT1", 4) != 0)
        throw_io("not a pulse-train file (bad magic): " + path);
    const std::uint32_t version = r.u32();
    if (version != 1)
        throw_io("unsupported pulse-train file version: " + path);
    PulseTrain train;
    train.params.photon_rate_hz = r.f64();
    train.params.afterpulse_prob = r.f64();
    train.params.afterpulse_tau_ns = r.f64();
    train.dead_time_ns = r.f64();
    train.params.dead_time = DeadTimeModel::constant(std::max(train.dead_time_ns, 0.0));
    train.afterpulse_count = r.u64();
    train.photon_count = r.u64();
    const std::uint64_t count = r.u64();
    if (r.remaining() != count * 8)
        throw_io("pulse-train payload size mismatch: " + path);
    train.timestamps_ns.resize(count);
    for (std::uint64_t i = 0; i < count; ++i)
        train.timestamps_ns[i] = r.f64();
    return train;
}

OutputFormat output_format_from_name(const std::string& name) {
    if (name == "csv")
        return OutputFormat::Csv;
    if (name == "json-lines")
        return OutputFormat::JsonLines;
    throw_invalid("unknown output format '" + name + "' (expected csv|json-lines)");
}

void write_sweep(const std::string& path, const SweepReport& report, OutputFormat format) {
    std::string out;
    if (format == OutputFormat::Csv)
        out += "frequency_hz,autocorr,std_error,n_bits,n_coincidences,rate_d0_hz,rate_d1_hz,mode,"
               "seed\n";
    for (const auto& row : report.rows) {
        if (format == OutputFormat::Csv) {
            out += fmt_double(row.frequency_hz) + ',' + fmt_double(row.autocorr.coefficient) +
                   ',' + fmt_double(row.autocorr.std_error) + ',' +
                   std::to_string(row.autocorr.n_bits) + ',' + std::to_string(row.n_coincidences) +
                   ',' + fmt_double(row.rate_d0_hz) + ',' + fmt_double(row.rate_d1_hz) + ',' +
                   rate_mode_name(report.rate_mode) + ',' + std::to_string(report.master_seed) +
                   '\n';
        } else {
            nlohmann::json j{{"frequency_hz", row.frequency_hz},
                             {"autocorr", row.autocorr.coefficient},
                             {"std_error", row.autocorr.std_error},
                             {"n_bits", row.autocorr.n_bits},
                             {"n_coincidences", row.n_coincidences},
                             {"rate_d0_hz", row.rate_d0_hz},
                             {"rate_d1_hz", row.rate_d1_hz},
                             {"mode", rate_mode_name(report.rate_mode)},
                             {"seed", report.master_seed}};
            out += j.dump() + '\n';
        }
    }
    write_file(path, out);
}

SweepReport read_sweep_csv(const std::string& path) {
    const std::string data = read_file(path);
    std::istringstream in(data);
    std::string line;
    if (!std::getline(in, line))
        throw_io("empty sweep file: " + path);
    const auto header = split_csv_line(line);
    const auto col = [&](const std::string& name) -> std::ptrdiff_t {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : it - header.begin();
    };
    const auto c_freq = col("frequency_hz");
    const auto c_a = col("autocorr");
    const auto c_se = col("std_error");
    if (c_freq < 0 || c_a < 0 || c_se < 0)
        throw_io("sweep file missing required columns: " + path);
    const auto c_nbits = col("n_bits");
    const auto c_coinc = col("n_coincidences");
    const auto c_r0 = col("rate_d0_hz");
    const auto c_r1 = col("rate_d1_hz");
    const auto c_mode = col("mode");
    const auto c_seed = col("seed");

    SweepReport report;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto f = split_csv_line(line);
        if (f.size() < header.size())
            throw_io("short sweep row in " + path);
        PointResult row;
        row.frequency_hz = parse_double_field(f[c_freq], path);
        row.autocorr.lag = 1;
        row.autocorr.coefficient = parse_double_field(f[c_a], path);
        row.autocorr.std_error = parse_double_field(f[c_se], path);
        if (c_nbits >= 0)
            row.autocorr.n_bits = static_cast<std::uint64_t>(parse_double_field(f[c_nbits], path));
        if (c_coinc >= 0)
            row.n_coincidences = static_cast<std::uint64_t>(parse_double_field(f[c_coinc], path));
        if (c_r0 >= 0)
            row.rate_d0_hz = parse_double_field(f[c_r0], path);
        if (c_r1 >= 0)
            row.rate_d1_hz = parse_double_field(f[c_r1], path);
        if (c_mode >= 0)
            report.rate_mode = rate_mode_from_name(f[c_mode]);
        if (c_seed >= 0)
            report.master_seed = static_cast<std::uint64_t>(parse_double_field(f[c_seed], path));
        report.rows.push_back(row);
    }
    return report;
}

void write_comparison(const std::string& path, const ComparisonReport& cmp, OutputFormat format) {
    const ReferenceTable& ref = reference_table();
    const double r1 = rms_error(ref.column(RefColumn::Sim1), ref.column(RefColumn::Meas));
    const double r2 = rms_error(ref.column(RefColumn::Sim2), ref.column(RefColumn::Meas));
    const double r3 = rms_error(ref.column(RefColumn::Sim3), ref.column(RefColumn::Meas));

    std::string out;
    if (format == OutputFormat::Csv) {
        out += "frequency_hz,a_run,a_ref,diff,ratio,zscore\n";
        for (const auto& row : cmp.rows)
            out += fmt_double(row.frequency_hz) + ',' + fmt_double(row.a_run) + ',' +
                   fmt_double(row.a_ref) + ',' + fmt_double(row.diff) + ',' +
                   fmt_double(row.ratio) + ',' + fmt_double(row.zscore) + '\n';
        out += std::string("R_run_vs_") + ref_column_name(cmp.column) + ',' +
               fmt_double(cmp.r_value) + ",,,,\n";
        out += "R_1," + fmt_double(r1) + ",,,,\n";
        out += "R_2," + fmt_double(r2) + ",,,,\n";
        out += "R_3," + fmt_double(r3) + ",,,,\n";
    } else {
        for (const auto& row : cmp.rows) {
            nlohmann::json j{{"frequency_hz", row.frequency_hz}, {"a_run", row.a_run},
                             {"a_ref", row.a_ref},               {"diff", row.diff},
                             {"ratio", row.ratio},               {"zscore", row.zscore}};
            out += j.dump() + '\n';
        }
        nlohmann::json summary{{"R_run_vs", ref_column_name(cmp.column)},
                               {"R_run", cmp.r_value},
                               {"R_1", r1},
                               {"R_2", r2},
                               {"R_3", r3}};
        out += summary.dump() + '\n';
    }
    write_file(path, out);
}

void write_histogram(const std::string& path, const ResidualHistogram& res, OutputFormat format) {
    std::string out;
    if (format == OutputFormat::Csv)
        out += "bin_start_ns,count,background,residual\n";
    for (std::size_t i = 0; i < res.hist.n_bins(); ++i) {
        const double clamped = std::max(res.residual[i], 0.0);
        if (format == OutputFormat::Csv) {
            out += fmt_double(res.hist.bin_start_ns(i)) + ',' + std::to_string(res.hist.counts[i]) +
                   ',' + fmt_double(res.background[i]) + ',' + fmt_double(clamped) + '\n';
        } else {
            nlohmann::json j{{"bin_start_ns", res.hist.bin_start_ns(i)},
                             {"count", res.hist.counts[i]},
                             {"background", res.background[i]},
                             {"residual", clamped}};
            out += j.dump() + '\n';
        }
    }
    write_file(path, out);
}

void write_reference_csv(const std::string& path, const ReferenceTable& table) {
    std::string out = "frequency_hz,a_meas,meas_error,a_sim1,a_sim2,a_sim3\n";
    for (const auto& r : table.rows)
        out += fmt_double(r.frequency_hz) + ',' + fmt_double(r.a_meas) + ',' +
               fmt_double(r.meas_error) + ',' + fmt_double(r.a_sim1) + ',' + fmt_double(r.a_sim2) +
               ',' + fmt_double(r.a_sim3) + '\n';
    write_file(path, out);
}

ReferenceTable read_reference_csv(const std::string& path) {
    const std::string data = read_file(path);
    std::istringstream in(data);
    std::string line;
    if (!std::getline(in, line))
        throw_io("empty reference file: " + path);
    if (split_csv_line(line) !=
        std::vector<std::string>{"frequency_hz", "a_meas", "meas_error", "a_sim1", "a_sim2",
                                 "a_sim3"})
        throw_io("unexpected reference table header: " + path);
    ReferenceTable table{};
    std::size_t i = 0;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        if (i >= table.rows.size())
            throw_io("too many reference table rows: " + path);
        const auto f = split_csv_line(line);
        if (f.size() != 6)
            throw_io("bad reference table row: " + path);
        table.rows[i] = {parse_double_field(f[0], path), parse_double_field(f[1], path),
                         parse_double_field(f[2], path), parse_double_field(f[3], path),
                         parse_double_field(f[4], path), parse_double_field(f[5], path)};
        ++i;
    }
    if (i != table.rows.size())
        throw_io("reference table must have exactly 14 rows: " + path);
    return table;
}

std::uint64_t fnv1a_file(const std::string& path) {
    const std::string data = read_file(path);
    std::uint64_t hash = 14695981039346656037ULL;
    for (unsigned char c : data) {
        hash ^= c;
        hash *= 1099511628211ULL;
    }
    return hash;
}

} // namespace spd
