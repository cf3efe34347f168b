#ifndef SPDSIM_REFERENCE_TABLE_HPP
#define SPDSIM_REFERENCE_TABLE_HPP

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace spd {

/// One row of the bundled measured-vs-simulated autocorrelation table.
struct ReferenceRow {
    double frequency_hz;
    double a_meas;
    double meas_error;
    double a_sim1;
    double a_sim2;
    double a_sim3;
};

enum class RefColumn { Meas, Sim1, Sim2, Sim3 };

RefColumn ref_column_from_name(const std::string& name);
const char* ref_column_name(RefColumn column);

/// Measured serial autocorrelation of the hardware generator plus the three
/// bundled simulation columns, on the 14-point frequency grid from 1 kHz to
/// 10 MHz. All simulated values carry the same statistical error.
struct ReferenceTable {
    static constexpr std::size_t n_rows = 14;
    static constexpr double sim_error = 1.1e-4;

    std::array<ReferenceRow, n_rows> rows;

    std::vector<double> frequencies() const;
    std::vector<double> column(RefColumn column) const;
    double row_error(RefColumn column, std::size_t row) const;
};

const ReferenceTable& reference_table();

} // namespace spd

#endif
