#include "resolver.hpp"

#include <bit>
#include <cmath>
#include <cstring>

namespace spd {

void ResolverConfig::validate() const {
    if (!(coincidence_window_ns >= 0.0) || !std::isfinite(coincidence_window_ns))
        throw_invalid("coincidence_window_ns must be finite and >= 0");
}

void BitStream::push_back(bool bit) {
    if ((n_bits_ & 7) == 0)
        bytes_.push_back(0);
    if (bit) {
        bytes_.back() |= static_cast<std::uint8_t>(1u << (n_bits_ & 7));
        ++n_ones_;
    }
    ++n_bits_;
}

void BitStream::truncate(std::uint64_t n) {
    if (n >= n_bits_)
        return;
    n_bits_ = n;
    bytes_.resize((n + 7) / 8);
    if (n & 7)
        bytes_.back() &= static_cast<std::uint8_t>((1u << (n & 7)) - 1);
    std::uint64_t ones = 0;
    for (std::uint8_t b : bytes_)
        ones += std::popcount(b);
    n_ones_ = ones;
}

void BitStream::complement() {
    for (auto& b : bytes_)
        b = static_cast<std::uint8_t>(~b);
    if (n_bits_ & 7)
        bytes_.back() &= static_cast<std::uint8_t>((1u << (n_bits_ & 7)) - 1);
    n_ones_ = n_bits_ - n_ones_;
}

BitStream BitStream::from_bytes(std::vector<std::uint8_t> bytes, std::uint64_t n_bits) {
    if (bytes.size() != (n_bits + 7) / 8)
        throw_invalid("bit count does not match byte payload");
    BitStream s;
    s.bytes_ = std::move(bytes);
    s.n_bits_ = n_bits;
    if (n_bits & 7)
        s.bytes_.back() &= static_cast<std::uint8_t>((1u << (n_bits & 7)) - 1);
    std::uint64_t ones = 0;
    for (std::uint8_t b : s.bytes_)
        ones += std::popcount(b);
    s.n_ones_ = ones;
    return s;
}

StreamingResolver::StreamingResolver(ResolverConfig cfg) : cfg_(cfg) { cfg_.validate(); }

void StreamingResolver::push0(std::span<const double> ts) {
    pending0_.insert(pending0_.end(), ts.begin(), ts.end());
    advance();
}

void StreamingResolver::push1(std::span<const double> ts) {
    pending1_.insert(pending1_.end(), ts.begin(), ts.end());
    advance();
}

void StreamingResolver::advance() {
    const double window = cfg_.coincidence_window_ns;
    while (!pending0_.empty() && !pending1_.empty()) {
        const double t0 = pending0_.front();
        const double t1 = pending1_.front();
        // Exact tie is only reached with window 0 and still counts as a
        // coincidence: neither detector fired strictly first.
        if (std::abs(t0 - t1) < window || t0 == t1) {
            pending0_.pop_front();
            pending1_.pop_front();
            consumed0_ += 1;
            consumed1_ += 1;
            ++n_coincidences_;
        } else if (t0 < t1) {
            pending0_.pop_front();
            consumed0_ += 1;
            bits_.push_back(false);
        } else {
            pending1_.pop_front();
            consumed1_ += 1;
            bits_.push_back(true);
        }
    }
}

void StreamingResolver::finish() {
    advance();
    while (!pending0_.empty()) {
        pending0_.pop_front();
        consumed0_ += 1;
        bits_.push_back(false);
    }
    while (!pending1_.empty()) {
        pending1_.pop_front();
        consumed1_ += 1;
        bits_.push_back(true);
    }
}

BitStream StreamingResolver::take() {
    bits_.set_coincidences(n_coincidences_);
    return std::move(bits_);
}

BitStream resolve_bits(std::span<const double> t0, std::span<const double> t1,
                       const ResolverConfig& cfg) {
    StreamingResolver r(cfg);
    r.push0(t0);
    r.push1(t1);
    r.finish();
    return r.take();
}

BitStream resolve_bits(const PulseTrain& train0, const PulseTrain& train1,
                       const ResolverConfig& cfg) {
    return resolve_bits(std::span<const double>(train0.timestamps_ns),
                        std::span<const double>(train1.timestamps_ns), cfg);
}

} // namespace spd
