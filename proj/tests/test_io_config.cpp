#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>

#include "config.hpp"
#include "detector.hpp"
#include "io.hpp"
#include "resolver.hpp"
#include "rng.hpp"
#include "support.hpp"

using namespace spd;

TEST_CASE("bitstream files round-trip, including awkward lengths") {
    Rng rng(3);
    for (std::uint64_t n : {0ull, 1ull, 7ull, 8ull, 9ull, 64ull, 1000ull}) {
        BitStream bits;
        for (std::uint64_t i = 0; i < n; ++i)
            bits.push_back(rng.uniform() < 0.5);
        const std::string path = spd_test::temp_path("bits.spb");
        write_bitstream(path, bits);
        const BitStream back = read_bitstream(path);
        CHECK(back.size() == n);
        CHECK(back.bytes() == bits.bytes());
        CHECK(back.n_ones() == bits.n_ones());
    }
}

TEST_CASE("bitstream file layout is magic, LE count, LSB-first bits") {
    BitStream bits;
    // 10 bits: 1,0,1,1,0,0,0,0 | 1,1  -> bytes 0x0D, 0x03
    for (const char c : std::string("1011000011"))
        bits.push_back(c == '1');
    const std::string path = spd_test::temp_path("layout.spb");
    write_bitstream(path, bits);
    const std::string raw = spd_test::slurp(path);
    REQUIRE(raw.size() == 4 + 8 + 2);
    CHECK(raw.substr(0, 4) == "SPB1");
    CHECK(static_cast<unsigned char>(raw[4]) == 10); // count LE
    for (int i = 5; i < 12; ++i)
        CHECK(raw[i] == 0);
    CHECK(static_cast<unsigned char>(raw[12]) == 0x0D);
    CHECK(static_cast<unsigned char>(raw[13]) == 0x03);
}

TEST_CASE("corrupt bitstream files are rejected") {
    const std::string path = spd_test::temp_path("bad.spb");
    {
        std::ofstream out(path, std::ios::binary);
        out << "SPBX" << std::string(8, '\0');
    }
    CHECK_THROWS_AS(read_bitstream(path), Error);
    CHECK_THROWS_AS(read_bitstream("/nonexistent/nowhere.spb"), Error);
}

TEST_CASE("pulse train files round-trip with parameters") {
    const auto p = DetectorParams::preset("d0", 20e3, DeadTimeModel::constant(20.0));
    const PulseTrain train = generate_pulse_train_n(p, 5000, 17);
    const std::string path = spd_test::temp_path("train.spt");
    write_pulse_train(path, train);
    const PulseTrain back = read_pulse_train(path);
    CHECK(back.timestamps_ns == train.timestamps_ns);
    CHECK(back.afterpulse_count == train.afterpulse_count);
    CHECK(back.photon_count == train.photon_count);
    CHECK(back.params.photon_rate_hz == doctest::Approx(20e3));
    CHECK(back.params.afterpulse_prob == doctest::Approx(0.047));
    CHECK(back.dead_time_ns == doctest::Approx(20.0));
}

TEST_CASE("reference table asset matches the embedded table (checksum test)") {
    const char* dir = std::getenv("SPDSIM_DATA_DIR");
    REQUIRE(dir != nullptr);
    const std::string path = std::string(dir) + "/reference_table.csv";
    CHECK(fnv1a_file(path) == 0xCB8D1BDFA55435EAull);

    const ReferenceTable parsed = read_reference_csv(path);
    const ReferenceTable& embedded = reference_table();
    for (std::size_t i = 0; i < ReferenceTable::n_rows; ++i) {
        CHECK(parsed.rows[i].frequency_hz == embedded.rows[i].frequency_hz);
        CHECK(parsed.rows[i].a_meas == embedded.rows[i].a_meas);
        CHECK(parsed.rows[i].meas_error == embedded.rows[i].meas_error);
        CHECK(parsed.rows[i].a_sim1 == embedded.rows[i].a_sim1);
        CHECK(parsed.rows[i].a_sim2 == embedded.rows[i].a_sim2);
        CHECK(parsed.rows[i].a_sim3 == embedded.rows[i].a_sim3);
    }
}

TEST_CASE("reference frequencies are the fixed grid") {
    const auto freqs = reference_table().frequencies();
    const std::vector<double> expected{1e3, 3e3, 1e4, 2e4, 5e4, 1e5, 2e5,
                                       5e5, 1e6, 2e6, 3e6, 5e6, 7.5e6, 1e7};
    CHECK(freqs == expected);
    CHECK(ReferenceTable::sim_error == 1.1e-4);
}

TEST_CASE("seed parsing accepts decimal and hex") {
    CHECK(parse_seed("42") == 42);
    CHECK(parse_seed("0x2A") == 42);
    CHECK(parse_seed("0xFFFFFFFFFFFFFFFF") == ~0ull);
    CHECK(parse_seed("18446744073709551615") == ~0ull);
    CHECK_THROWS_AS(parse_seed("12abc"), Error);
    CHECK_THROWS_AS(parse_seed(""), Error);
    CHECK_THROWS_AS(parse_seed("-3"), Error);
}

TEST_CASE("run config parses the documented sections and keys") {
    const std::string text = R"(
# sweep configuration
[detector0]
preset = "d0"
dead_time_model = "sim2"

[detector1]
photon_rate_hz = 1e6
afterpulse_prob = 0.043
afterpulse_tau_ns = 40.0
dead_time_model = "ramp"
dead_time_ns = 13.8
ramp_knee_hz = 5e6
ramp_max_hz = 10e6
ramp_dead_max_ns = 16.8

[resolver]
coincidence_window_ns = 0.0

[run]
frequencies_hz = [1000, 20000, 1e6]
n_bits_per_point = 100000
master_seed = 0xABCD
rate_mode = "calibrated"
)";
    const RunConfig cfg = run_config_from_string(text);
    CHECK(cfg.detector0.afterpulse_prob == doctest::Approx(0.047));
    CHECK(cfg.detector0.afterpulse_tau_ns == doctest::Approx(33.0));
    CHECK(cfg.detector0.dead_time.effective_ns(1e6) == doctest::Approx(13.8));
    CHECK(cfg.detector1.dead_time.kind == DeadTimeModel::Kind::RateRamp);
    CHECK(cfg.detector1.dead_time.effective_ns(7.5e6) == doctest::Approx(15.3));
    CHECK(cfg.resolver.coincidence_window_ns == 0.0);
    CHECK(cfg.frequencies_hz == std::vector<double>{1000.0, 20000.0, 1e6});
    CHECK(cfg.n_bits_per_point == 100000);
    CHECK(cfg.master_seed == 0xABCD);
    CHECK(cfg.rate_mode == RateMode::Calibrated);
}

TEST_CASE("config defaults fill in when keys are absent") {
    const RunConfig cfg = run_config_from_string("[detector0]\npreset = \"d0\"\n"
                                                 "dead_time_model = \"sim1\"\n"
                                                 "[detector1]\npreset = \"d1\"\n"
                                                 "dead_time_model = \"sim1\"\n");
    CHECK(cfg.frequencies_hz.size() == 14); // reference grid
    CHECK(cfg.n_bits_per_point == 10'000'000);
    CHECK(cfg.master_seed == 1);
    CHECK(cfg.rate_mode == RateMode::Direct);
    CHECK(cfg.resolver.coincidence_window_ns == doctest::Approx(12.0));
}

TEST_CASE("config rejects malformed input") {
    CHECK_THROWS_AS(run_config_from_string("[run\nmaster_seed = 1\n"), Error);
    CHECK_THROWS_AS(run_config_from_string("[run]\nmaster_seed\n"), Error);
    CHECK_THROWS_AS(run_config_from_string("[run]\nn_bits_per_point = \"many\"\n"), Error);
    CHECK_THROWS_AS(run_config_from_string("[detector0]\nphoton_rate_hz = -4\n"), Error);
    CHECK_THROWS_AS(run_config_from_string("[run]\nrate_mode = \"psychic\"\n"), Error);
    CHECK_THROWS_AS(
        run_config_from_string("[detector0]\ndead_time_model = \"sim2\"\ndead_time_ns = 5\n"),
        Error);
    CHECK_THROWS_AS(load_run_config("/nonexistent/config.toml"), Error);
}

TEST_CASE("sweep csv round-trips through the reader") {
    SweepReport report;
    report.master_seed = 99;
    report.rate_mode = RateMode::Calibrated;
    for (int i = 0; i < 3; ++i) {
        PointResult r;
        r.frequency_hz = 1000.0 * (i + 1);
        r.autocorr.coefficient = 0.01 * i - 0.005;
        r.autocorr.std_error = 3.2e-4;
        r.autocorr.n_bits = 1'000'000;
        r.n_coincidences = 42 + i;
        r.rate_d0_hz = 1000.0 * (i + 1) * 1.03;
        r.rate_d1_hz = 1000.0 * (i + 1) * 1.02;
        report.rows.push_back(r);
    }
    const std::string path = spd_test::temp_path("sweep.csv");
    write_sweep(path, report, OutputFormat::Csv);
    const SweepReport back = read_sweep_csv(path);
    REQUIRE(back.rows.size() == 3);
    CHECK(back.master_seed == 99);
    CHECK(back.rate_mode == RateMode::Calibrated);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(back.rows[i].frequency_hz == report.rows[i].frequency_hz);
        CHECK(back.rows[i].autocorr.coefficient ==
              doctest::Approx(report.rows[i].autocorr.coefficient).epsilon(1e-9));
        CHECK(back.rows[i].n_coincidences == report.rows[i].n_coincidences);
    }
    CHECK_THROWS_AS(read_sweep_csv("/nonexistent/sweep.csv"), Error);
}

TEST_CASE("json-lines output carries one object per row") {
    SweepReport report;
    PointResult r;
    r.frequency_hz = 1000.0;
    r.autocorr.coefficient = 0.0123;
    r.autocorr.std_error = 1e-3;
    r.autocorr.n_bits = 1000;
    report.rows.push_back(r);
    const std::string path = spd_test::temp_path("sweep.jsonl");
    write_sweep(path, report, OutputFormat::JsonLines);
    const std::string text = spd_test::slurp(path);
    CHECK(text.find("\"frequency_hz\":1000.0") != std::string::npos);
    CHECK(text.find("\"autocorr\":0.0123") != std::string::npos);
    CHECK(std::count(text.begin(), text.end(), '\n') == 1);

    CHECK_THROWS_AS(output_format_from_name("xml"), Error);
}
