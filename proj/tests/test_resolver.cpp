#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "detector.hpp"
#include "resolver.hpp"
#include "rng.hpp"
#include "support.hpp"

using namespace spd;

namespace {

std::string to_string(const BitStream& bits) {
    std::string s;
    for (std::uint64_t i = 0; i < bits.size(); ++i)
        s.push_back(bits.get(i) ? '1' : '0');
    return s;
}

BitStream resolve(const std::vector<double>& t0, const std::vector<double>& t1, double window) {
    ResolverConfig cfg;
    cfg.coincidence_window_ns = window;
    return resolve_bits(std::span<const double>(t0), std::span<const double>(t1), cfg);
}

std::vector<double> random_train(Rng& rng, std::size_t n, double mean_gap) {
    std::vector<double> ts(n);
    double t = 0.0;
    for (auto& x : ts) {
        t += rng.exponential(mean_gap);
        x = t;
    }
    return ts;
}

} // namespace

TEST_CASE("solo firings and hand-traced merges") {
    CHECK(to_string(resolve({100}, {}, 12)) == "0");
    CHECK(to_string(resolve({}, {100}, 12)) == "1");
    CHECK(to_string(resolve({}, {}, 12)).empty());

    const BitStream coincident = resolve({100}, {105}, 12);
    CHECK(coincident.size() == 0);
    CHECK(coincident.n_coincidences() == 1);

    const BitStream merged = resolve({100, 300}, {150}, 12);
    CHECK(to_string(merged) == "010");
    CHECK(merged.n_coincidences() == 0);
}

TEST_CASE("exact tie counts as a coincidence even at window 0") {
    const BitStream bits = resolve({5, 100}, {5}, 0.0);
    CHECK(bits.n_coincidences() == 1);
    CHECK(to_string(bits) == "0");
}

TEST_CASE("window 0 gives the exact time-ordered interleaving") {
    Rng rng(123);
    const auto t0 = random_train(rng, 2000, 50.0);
    const auto t1 = random_train(rng, 2000, 50.0);
    const BitStream bits = resolve(t0, t1, 0.0);
    CHECK(bits.n_coincidences() == 0);
    REQUIRE(bits.size() == 4000);
    std::size_t i0 = 0, i1 = 0;
    for (std::uint64_t i = 0; i < bits.size(); ++i) {
        const bool expect_one = i0 >= t0.size() || (i1 < t1.size() && t1[i1] < t0[i0]);
        CHECK(bits.get(i) == expect_one);
        (expect_one ? i1 : i0)++;
    }
}

TEST_CASE("conservation identity on random trains") {
    Rng rng(7);
    for (double window : {0.0, 5.0, 12.0, 40.0}) {
        const auto t0 = random_train(rng, 10'000, 30.0);
        const auto t1 = random_train(rng, 12'000, 25.0);
        const BitStream bits = resolve(t0, t1, window);
        CHECK(t0.size() + t1.size() == bits.size() + 2 * bits.n_coincidences());
        CHECK(bits.n_zeros() + bits.n_ones() == bits.size());
    }
}

TEST_CASE("swapping inputs complements every bit") {
    Rng rng(42);
    const auto t0 = random_train(rng, 5000, 40.0);
    const auto t1 = random_train(rng, 5000, 40.0);
    const BitStream ab = resolve(t0, t1, 12.0);
    const BitStream ba = resolve(t1, t0, 12.0);
    REQUIRE(ab.size() == ba.size());
    CHECK(ab.n_coincidences() == ba.n_coincidences());
    for (std::uint64_t i = 0; i < ab.size(); ++i)
        CHECK(ab.get(i) != ba.get(i));
}

TEST_CASE("bit count is non-increasing in the window") {
    Rng rng(99);
    const auto t0 = random_train(rng, 20'000, 35.0);
    const auto t1 = random_train(rng, 20'000, 35.0);
    std::uint64_t prev = ~0ull;
    for (double window : {0.0, 2.0, 6.0, 12.0, 25.0, 60.0}) {
        const std::uint64_t n = resolve(t0, t1, window).size();
        CHECK(n <= prev);
        prev = n;
    }
}

TEST_CASE("streaming chunked feed equals the whole-train resolve") {
    Rng rng(5);
    const auto t0 = random_train(rng, 30'000, 40.0);
    const auto t1 = random_train(rng, 28'000, 45.0);
    const BitStream whole = resolve(t0, t1, 12.0);

    StreamingResolver streaming(ResolverConfig{12.0});
    std::size_t i0 = 0, i1 = 0;
    Rng chunker(1);
    while (i0 < t0.size() || i1 < t1.size()) {
        const std::size_t c0 = std::min<std::size_t>(1 + chunker.next_u64() % 701, t0.size() - i0);
        const std::size_t c1 = std::min<std::size_t>(1 + chunker.next_u64() % 701, t1.size() - i1);
        streaming.push0(std::span<const double>(t0).subspan(i0, c0));
        streaming.push1(std::span<const double>(t1).subspan(i1, c1));
        i0 += c0;
        i1 += c1;
    }
    streaming.finish();
    const BitStream chunked = streaming.take();
    REQUIRE(chunked.size() == whole.size());
    CHECK(chunked.n_coincidences() == whole.n_coincidences());
    CHECK(chunked.bytes() == whole.bytes());
}

TEST_CASE("streaming consumed counters satisfy conservation at any stop point") {
    Rng rng(31);
    StreamingResolver r(ResolverConfig{12.0});
    double t0 = 0, t1 = 0;
    for (int step = 0; step < 5000; ++step) {
        t0 += rng.exponential(30.0);
        r.push0(t0);
        if (step % 3 != 0) {
            t1 += rng.exponential(45.0);
            r.push1(t1);
        }
        CHECK(r.consumed0() + r.consumed1() ==
              r.bits().size() + 2 * r.n_coincidences());
    }
}

TEST_CASE("bit stream truncation and complement bookkeeping") {
    BitStream b;
    for (int i = 0; i < 21; ++i)
        b.push_back(i % 3 == 0);
    CHECK(b.size() == 21);
    CHECK(b.n_ones() == 7);
    b.truncate(10);
    CHECK(b.size() == 10);
    CHECK(b.n_ones() == 4);
    b.complement();
    CHECK(b.n_ones() == 6);
    CHECK(b.n_zeros() == 4);
    CHECK_FALSE(b.get(0));
    CHECK(b.get(1));
}

TEST_CASE("negative window is rejected") {
    ResolverConfig cfg;
    cfg.coincidence_window_ns = -1.0;
    CHECK_THROWS_AS(cfg.validate(), Error);
}
