#include "reference_table.hpp"

#include "error.hpp"

namespace spd {

namespace {

// f_hz, a_meas, meas_error, a_sim1, a_sim2, a_sim3
constexpr ReferenceTable kTable = {{{
    {1e3, 0.03047, 0.00034, 0.02470, 0.02933, 0.02926},
    {3e3, 0.03013, 0.00024, 0.02467, 0.02923, 0.02917},
    {1e4, 0.02978, 0.00016, 0.02445, 0.02927, 0.02915},
    {2e4, 0.02940, 0.00016, 0.02411, 0.02882, 0.02877},
    {5e4, 0.02847, 0.00016, 0.02336, 0.02846, 0.02843},
    {1e5, 0.02708, 0.00016, 0.02222, 0.02760, 0.02750},
    {2e5, 0.02429, 0.00016, 0.02001, 0.02579, 0.02555},
    {5e5, 0.01914, 0.00016, 0.01294, 0.02045, 0.02051},
    {1e6, 0.01088, 0.00016, 0.00176, 0.01163, 0.01169},
    {2e6, -0.00496, 0.00008, -0.02055, -0.00505, -0.00499},
    {3e6, -0.02061, 0.00011, -0.04135, -0.02090, -0.02100},
    {5e6, -0.05156, 0.00016, -0.08001, -0.05057, -0.05055},
    {7.5e6, -0.09080, 0.00016, -0.12365, -0.08476, -0.09157},
    {1e7, -0.13385, 0.00016, -0.16296, -0.11566, -0.13229},
}}};

} // namespace

const ReferenceTable& reference_table() { return kTable; }

RefColumn ref_column_from_name(const std::string& name) {
    if (name == "meas")
        return RefColumn::Meas;
    if (name == "sim1")
        return RefColumn::Sim1;
    if (name == "sim2")
        return RefColumn::Sim2;
    if (name == "sim3")
        return RefColumn::Sim3;
    throw_invalid("unknown reference column '" + name + "' (expected meas|sim1|sim2|sim3)");
}

const char* ref_column_name(RefColumn column) {
    switch (column) {
    case RefColumn::Meas:
        return "meas";
    case RefColumn::Sim1:
        return "sim1";
    case RefColumn::Sim2:
        return "sim2";
    case RefColumn::Sim3:
        return "sim3";
    }
    return "?";
}

std::vector<double> ReferenceTable::frequencies() const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows)
        out.push_back(r.frequency_hz);
    return out;
}

std::vector<double> ReferenceTable::column(RefColumn column) const {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        switch (column) {
        case RefColumn::Meas:
            out.push_back(r.a_meas);
            break;
        case RefColumn::Sim1:
            out.push_back(r.a_sim1);
            break;
        case RefColumn::Sim2:
            out.push_back(r.a_sim2);
            break;
        case RefColumn::Sim3:
            out.push_back(r.a_sim3);
            break;
        }
    }
    return out;
}

double ReferenceTable::row_error(RefColumn column, std::size_t row) const {
    if (row >= rows.size())
        throw_invalid("reference row index out of range");
    return column == RefColumn::Meas ? rows[row].meas_error : sim_error;
}

} // namespace spd
