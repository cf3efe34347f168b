#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <spdsim.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "support.hpp"

namespace {

struct Cleanup {
    std::vector<spd_detector*> detectors;
    std::vector<spd_train*> trains;
    std::vector<spd_bits*> bits;
    std::vector<spd_hist*> hists;
    std::vector<spd_run_config*> configs;
    std::vector<spd_sweep*> sweeps;
    ~Cleanup() {
        for (auto* p : detectors)
            spd_detector_destroy(p);
        for (auto* p : trains)
            spd_train_destroy(p);
        for (auto* p : bits)
            spd_bits_destroy(p);
        for (auto* p : hists)
            spd_hist_destroy(p);
        for (auto* p : configs)
            spd_config_destroy(p);
        for (auto* p : sweeps)
            spd_sweep_destroy(p);
    }
};

} // namespace

TEST_CASE("version and status strings") {
    CHECK(spd_version() != nullptr);
    CHECK(std::string(spd_status_name(SPD_OK)) == "ok");
    CHECK(std::string(spd_status_name(SPD_ERR_FIT)) == "fit error");
}

TEST_CASE("null handles are rejected with messages") {
    CHECK(spd_rng_uniform(nullptr, nullptr) == SPD_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(spd_last_error()) > 0);
    double out = 0.0;
    CHECK(spd_detector_expected_interval(nullptr, 0.0, &out) == SPD_ERR_INVALID_ARGUMENT);
    CHECK(spd_train_load(nullptr, nullptr) == SPD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("rng behaves through the C surface") {
    spd_rng* rng = nullptr;
    REQUIRE(spd_rng_create(42, &rng) == SPD_OK);
    double u = 0.0;
    for (int i = 0; i < 1000; ++i) {
        CHECK(spd_rng_uniform(rng, &u) == SPD_OK);
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
    double e = -1.0;
    CHECK(spd_rng_exponential(rng, 10.0, &e) == SPD_OK);
    CHECK(e >= 0.0);
    CHECK(spd_rng_exponential(rng, -1.0, &e) == SPD_ERR_INVALID_ARGUMENT);
    spd_rng_destroy(rng);

    CHECK(spd_derive_seed(9, 0) != spd_derive_seed(9, 1));
    uint64_t seed = 0;
    CHECK(spd_parse_seed("0x10", &seed) == SPD_OK);
    CHECK(seed == 16);
    CHECK(spd_parse_seed("zzz", &seed) == SPD_ERR_CONFIG);
}

TEST_CASE("detector lifecycle, presets, and dead-time models") {
    Cleanup gc;
    spd_detector* det = nullptr;
    REQUIRE(spd_detector_create_preset("d0", 1e6, &det) == SPD_OK);
    gc.detectors.push_back(det);

    CHECK(spd_detector_create_preset("d9", 1e6, &det) == SPD_ERR_INVALID_ARGUMENT);
    spd_detector* bad = nullptr;
    CHECK(spd_detector_create(-1.0, 0.0, 1.0, &bad) == SPD_ERR_INVALID_ARGUMENT);

    spd_detector* d = gc.detectors[0];
    CHECK(spd_detector_set_dead_time_preset(d, "sim3") == SPD_OK);
    double dead = 0.0;
    CHECK(spd_detector_effective_dead_time(d, 7.5e6, &dead) == SPD_OK);
    CHECK(dead == doctest::Approx(15.3));

    CHECK(spd_detector_set_dead_time_constant(d, 13.8) == SPD_OK);
    double mean = 0.0;
    CHECK(spd_detector_expected_interval(d, 13.8, &mean) == SPD_OK);
    CHECK(mean == doctest::Approx(983.9).epsilon(1e-3));

    double input = 0.0;
    CHECK(spd_detector_calibrate_input_rate(d, 13.8, 1e6, 1e-3, &input) == SPD_OK);
    CHECK(input > 0.9e6);
    CHECK(spd_detector_calibrate_input_rate(d, 13.8, 1e18, 1e-3, &input) ==
          SPD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("train generation, saving, and loading") {
    Cleanup gc;
    spd_detector* det = nullptr;
    REQUIRE(spd_detector_create_preset("d0", 20e3, &det) == SPD_OK);
    gc.detectors.push_back(det);
    REQUIRE(spd_detector_set_dead_time_constant(det, 20.0) == SPD_OK);

    spd_train* train = nullptr;
    REQUIRE(spd_train_generate_n(det, 10'000, 5, &train) == SPD_OK);
    gc.trains.push_back(train);
    CHECK(spd_train_size(train) == 10'000);
    CHECK(spd_train_afterpulse_count(train) + spd_train_photon_count(train) == 10'000);
    CHECK(spd_train_dead_time_ns(train) == doctest::Approx(20.0));

    const double* ts = spd_train_timestamps(train);
    REQUIRE(ts != nullptr);
    for (std::size_t i = 1; i < 10'000; ++i)
        CHECK(ts[i] - ts[i - 1] >= 20.0);

    const std::string path = spd_test::temp_path("capi_train.spt");
    CHECK(spd_train_save(train, path.c_str()) == SPD_OK);
    spd_train* loaded = nullptr;
    REQUIRE(spd_train_load(path.c_str(), &loaded) == SPD_OK);
    gc.trains.push_back(loaded);
    CHECK(spd_train_size(loaded) == 10'000);
    CHECK(spd_train_load("/nonexistent.spt", &loaded) == SPD_ERR_IO);

    spd_train* by_duration = nullptr;
    REQUIRE(spd_train_generate_duration(det, 1e9, 6, &by_duration) == SPD_OK);
    gc.trains.push_back(by_duration);
    CHECK(spd_train_size(by_duration) > 0);
}

TEST_CASE("resolver and bit files through the C surface") {
    Cleanup gc;
    spd_detector* d0 = nullptr;
    spd_detector* d1 = nullptr;
    REQUIRE(spd_detector_create_preset("d0", 1e6, &d0) == SPD_OK);
    REQUIRE(spd_detector_create_preset("d1", 1e6, &d1) == SPD_OK);
    gc.detectors = {d0, d1};
    spd_detector_set_dead_time_constant(d0, 13.8);
    spd_detector_set_dead_time_constant(d1, 13.8);

    spd_train* t0 = nullptr;
    spd_train* t1 = nullptr;
    REQUIRE(spd_train_generate_n(d0, 50'000, 11, &t0) == SPD_OK);
    REQUIRE(spd_train_generate_n(d1, 50'000, 12, &t1) == SPD_OK);
    gc.trains = {t0, t1};

    spd_bits* bits = nullptr;
    REQUIRE(spd_resolve(t0, t1, 12.0, &bits) == SPD_OK);
    gc.bits.push_back(bits);
    CHECK(spd_bits_size(bits) + 2 * spd_bits_coincidences(bits) == 100'000);
    CHECK(spd_bits_zeros(bits) + spd_bits_ones(bits) == spd_bits_size(bits));
    CHECK(spd_bits_get(bits, 0) >= 0);
    CHECK(spd_bits_get(bits, spd_bits_size(bits)) == -1);

    const std::string path = spd_test::temp_path("capi_bits.spb");
    CHECK(spd_bits_save(bits, path.c_str()) == SPD_OK);
    spd_bits* loaded = nullptr;
    REQUIRE(spd_bits_load(path.c_str(), &loaded) == SPD_OK);
    gc.bits.push_back(loaded);
    CHECK(spd_bits_size(loaded) == spd_bits_size(bits));

    spd_autocorr_result ac{};
    CHECK(spd_autocorrelation(bits, 1, &ac) == SPD_OK);
    CHECK(std::abs(ac.coefficient) < 1.0);
    CHECK(ac.n_bits == spd_bits_size(bits));

    spd_bits* streamed = nullptr;
    REQUIRE(spd_generate_bits(d0, d1, 0.0, 100'000, 33, &streamed) == SPD_OK);
    gc.bits.push_back(streamed);
    CHECK(spd_bits_size(streamed) == 100'000);
}

TEST_CASE("histogram and fit through the C surface") {
    Cleanup gc;
    spd_detector* det = nullptr;
    REQUIRE(spd_detector_create_preset("d0", 20e3, &det) == SPD_OK);
    gc.detectors.push_back(det);
    spd_detector_set_dead_time_constant(det, 20.0);
    spd_train* train = nullptr;
    REQUIRE(spd_train_generate_n(det, 2'000'000, 21, &train) == SPD_OK);
    gc.trains.push_back(train);

    spd_hist* hist = nullptr;
    REQUIRE(spd_histogram(train, 1.0, 1000.0, &hist) == SPD_OK);
    gc.hists.push_back(hist);
    CHECK(spd_hist_n_bins(hist) == 1000);

    spd_afterpulse_fit fit{};
    CHECK(spd_fit_afterpulse(hist, 20.0, 0.0, 0.0, 40.0, &fit) == SPD_ERR_INVALID_ARGUMENT);
    REQUIRE(spd_hist_subtract_background(hist, 20e3) == SPD_OK);
    REQUIRE(spd_fit_afterpulse(hist, 20.0, 0.0, 0.0, 40.0, &fit) == SPD_OK);
    CHECK(std::abs(fit.tau_ns - 33.0) < 6.0);
    CHECK(fit.n_bins_used >= 10);

    double start = 0.0, count = 0.0, bg = 0.0, resid = 0.0;
    CHECK(spd_hist_bin(hist, 30, &start, &count, &bg, &resid) == SPD_OK);
    CHECK(start == doctest::Approx(30.0));
    CHECK(spd_hist_bin(hist, 99999, &start, &count, &bg, &resid) == SPD_ERR_INVALID_ARGUMENT);

    const std::string path = spd_test::temp_path("capi_hist.csv");
    CHECK(spd_hist_save(hist, path.c_str(), "csv") == SPD_OK);
    const std::string text = spd_test::slurp(path);
    CHECK(text.rfind("bin_start_ns,count,background,residual\n", 0) == 0);
}

TEST_CASE("sweep pipeline and reference comparison through the C surface") {
    Cleanup gc;
    spd_run_config* cfg = nullptr;
    REQUIRE(spd_config_preset("sim2", &cfg) == SPD_OK);
    gc.configs.push_back(cfg);
    CHECK(spd_config_set_seed(cfg, 31337) == SPD_OK);
    CHECK(spd_config_set_bits_per_point(cfg, 20'000) == SPD_OK);
    CHECK(spd_config_set_window(cfg, 0.0) == SPD_OK);
    CHECK(spd_config_set_rate_mode(cfg, "direct") == SPD_OK);
    CHECK(spd_config_set_rate_mode(cfg, "wrong") == SPD_ERR_INVALID_ARGUMENT);

    spd_sweep* sweep = nullptr;
    REQUIRE(spd_sweep_run(cfg, 2, &sweep) == SPD_OK);
    gc.sweeps.push_back(sweep);
    REQUIRE(spd_sweep_size(sweep) == 14);
    spd_sweep_row row{};
    CHECK(spd_sweep_row_get(sweep, 0, &row) == SPD_OK);
    CHECK(row.frequency_hz == 1000.0);
    CHECK(row.n_bits == 20'000);

    double r = 0.0;
    CHECK(spd_sweep_r_vs(sweep, "meas", &r) == SPD_OK);
    CHECK(r > 0.0);
    CHECK(spd_sweep_r_vs(sweep, "simX", &r) == SPD_ERR_INVALID_ARGUMENT);

    const std::string sweep_path = spd_test::temp_path("capi_sweep.csv");
    REQUIRE(spd_sweep_save(sweep, sweep_path.c_str(), "csv") == SPD_OK);
    spd_sweep* loaded = nullptr;
    REQUIRE(spd_sweep_load_csv(sweep_path.c_str(), &loaded) == SPD_OK);
    gc.sweeps.push_back(loaded);
    CHECK(spd_sweep_size(loaded) == 14);

    const std::string cmp_path = spd_test::temp_path("capi_cmp.csv");
    double r2 = 0.0;
    REQUIRE(spd_compare_to_reference(loaded, "sim2", cmp_path.c_str(), "csv", &r2) == SPD_OK);
    CHECK(std::abs(r2 - r) < 1.0); // same sweep, different column; both finite
    const std::string cmp_text = spd_test::slurp(cmp_path);
    CHECK(cmp_text.rfind("frequency_hz,a_run,a_ref,diff,ratio,zscore\n", 0) == 0);
    CHECK(cmp_text.find("R_run_vs_sim2,") != std::string::npos);
    CHECK(cmp_text.find("R_1,") != std::string::npos);

    // frequencies off the reference grid cannot be compared
    const double freqs[2] = {1e3, 2e3};
    CHECK(spd_config_set_frequencies(cfg, freqs, 2) == SPD_OK);
    spd_sweep* off_grid = nullptr;
    REQUIRE(spd_sweep_run(cfg, 1, &off_grid) == SPD_OK);
    gc.sweeps.push_back(off_grid);
    CHECK(spd_sweep_r_vs(off_grid, "meas", &r) == SPD_ERR_INVALID_ARGUMENT);
}

TEST_CASE("reference table access") {
    REQUIRE(spd_reference_rows() == 14);
    double f = 0.0, meas = 0.0, err = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    CHECK(spd_reference_row_get(0, &f, &meas, &err, &s1, &s2, &s3) == SPD_OK);
    CHECK(f == 1000.0);
    CHECK(meas == 0.03047);
    CHECK(err == 0.00034);
    CHECK(s1 == 0.02470);
    CHECK(spd_reference_row_get(14, &f, &meas, &err, &s1, &s2, &s3) ==
          SPD_ERR_INVALID_ARGUMENT);
    CHECK(spd_reference_sim_error() == 1.1e-4);
}
