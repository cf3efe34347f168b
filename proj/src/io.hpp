#ifndef SPDSIM_IO_HPP
#define SPDSIM_IO_HPP

#include <string>

#include "harness.hpp"
#include "stats.hpp"

namespace spd {

/// Bitstream file: magic "SPB1", 8-byte little-endian bit count, bits
/// packed 8 per byte with the first bit in the least-significant position.
void write_bitstream(const std::string& path, const BitStream& bits);
BitStream read_bitstream(const std::string& path);

/// Pulse-train file: magic "SPT1", u32 version, generating parameters
/// (photon rate, afterpulse probability/lifetime, effective dead time),
/// afterpulse/photon counts, u64 pulse count, then f64 timestamps (ns).
/// All fields little-endian.
void write_pulse_train(const std::string& path, const PulseTrain& train);
PulseTrain read_pulse_train(const std::string& path);

enum class OutputFormat { Csv, JsonLines };
OutputFormat output_format_from_name(const std::string& name);

/// Sweep table: frequency_hz, autocorr, std_error, n_bits, n_coincidences,
/// rate_d0_hz, rate_d1_hz, mode, seed.
void write_sweep(const std::string& path, const SweepReport& report, OutputFormat format);
SweepReport read_sweep_csv(const std::string& path);

/// Comparison table: frequency_hz, a_run, a_ref, diff, ratio, zscore, with
/// summary footer rows carrying the run's R value and the bundled columns'.
void write_comparison(const std::string& path, const ComparisonReport& cmp, OutputFormat format);

/// Histogram analysis table: bin_start_ns, count, background, residual
/// (residual clamped at zero for reporting).
void write_histogram(const std::string& path, const ResidualHistogram& res, OutputFormat format);

/// Reference table asset: frequency_hz, a_meas, meas_error, a_sim1, a_sim2,
/// a_sim3.
void write_reference_csv(const std::string& path, const ReferenceTable& table);
ReferenceTable read_reference_csv(const std::string& path);

/// FNV-1a 64-bit digest of a file's bytes; guards checked-in data assets.
std::uint64_t fnv1a_file(const std::string& path);

} // namespace spd

#endif
