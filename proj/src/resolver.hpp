#ifndef SPDSIM_RESOLVER_HPP
#define SPDSIM_RESOLVER_HPP

#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "detector.hpp"

namespace spd {

struct ResolverConfig {
    /// Pulses from the two detectors closer than this are rejected as a
    /// coincidence and emit no bit. 0 disables rejection (exact ties still
    /// count as coincidences).
    double coincidence_window_ns = 12.0;

    void validate() const;
};

/// Packed random bit sequence plus the resolver bookkeeping. Bit i lives at
/// byte i/8, position i%8 (LSB first), matching the on-disk layout.
class BitStream {
public:
    void push_back(bool bit);
    void reserve_bits(std::uint64_t n) { bytes_.reserve((n + 7) / 8); }

    bool get(std::uint64_t i) const { return (bytes_[i >> 3] >> (i & 7)) & 1u; }
    std::uint64_t size() const { return n_bits_; }
    std::uint64_t n_ones() const { return n_ones_; }
    std::uint64_t n_zeros() const { return n_bits_ - n_ones_; }

    std::uint64_t n_coincidences() const { return n_coincidences_; }
    void set_coincidences(std::uint64_t n) { n_coincidences_ = n; }

    /// Drop all bits past n; ones are recounted from the packed words.
    void truncate(std::uint64_t n);

    /// In-place 0<->1 swap of every bit.
    void complement();

    const std::vector<std::uint8_t>& bytes() const { return bytes_; }
    static BitStream from_bytes(std::vector<std::uint8_t> bytes, std::uint64_t n_bits);

private:
    std::vector<std::uint8_t> bytes_;
    std::uint64_t n_bits_ = 0;
    std::uint64_t n_ones_ = 0;
    std::uint64_t n_coincidences_ = 0;
};

/// Two-cursor merge of two pulse trains into bits, emulating the
/// bit-resolving logic: 0 when detector 0 fires alone, 1 when detector 1
/// fires alone, nothing when the two overlap within the coincidence window.
/// Incremental: push pulses in time order per detector, read bits as they
/// become decidable (a pulse is only decided once the other detector's
/// cursor has caught up). Conservation holds at any stopping point:
/// consumed0 + consumed1 == bits + 2 * coincidences.
class StreamingResolver {
public:
    explicit StreamingResolver(ResolverConfig cfg);

    void push0(double t_ns) { pending0_.push_back(t_ns); advance(); }
    void push1(double t_ns) { pending1_.push_back(t_ns); advance(); }
    void push0(std::span<const double> ts);
    void push1(std::span<const double> ts);

    bool wants0() const { return pending0_.empty(); }
    bool wants1() const { return pending1_.empty(); }

    void reserve_bits(std::uint64_t n) { bits_.reserve_bits(n); }

    /// Declare both inputs exhausted: the tail of the longer train emits
    /// its bits normally.
    void finish();

    const BitStream& bits() const { return bits_; }
    std::uint64_t n_coincidences() const { return n_coincidences_; }
    std::uint64_t consumed0() const { return consumed0_; }
    std::uint64_t consumed1() const { return consumed1_; }

    /// Move the accumulated bits out (coincidence count attached).
    BitStream take();

private:
    void advance();

    ResolverConfig cfg_;
    std::deque<double> pending0_;
    std::deque<double> pending1_;
    BitStream bits_;
    std::uint64_t n_coincidences_ = 0;
    std::uint64_t consumed0_ = 0;
    std::uint64_t consumed1_ = 0;
};

/// Whole-train resolve: feeds both trains through the streaming merge and
/// drains the tails.
BitStream resolve_bits(const PulseTrain& train0, const PulseTrain& train1,
                       const ResolverConfig& cfg);
BitStream resolve_bits(std::span<const double> t0, std::span<const double> t1,
                       const ResolverConfig& cfg);

} // namespace spd

#endif
