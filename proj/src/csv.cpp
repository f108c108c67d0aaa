#include "gcs/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace gcs::cli {

std::string format_sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12e", v);
    return buf;
}

std::string format_time_tag(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", t);
    return buf;
}

namespace {
std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // LF endings on every platform
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    return out;
}
} // namespace

void write_timeseries_csv(const fem::SimulationRecord& rec, const std::string& path) {
    auto out = open_out(path);
    out << "t,rho,mass,q_regime\n";
    for (std::size_t i = 0; i < rec.times.size(); ++i)
        out << format_sci(rec.times[i]) << ',' << format_sci(rec.rho_series[i]) << ','
            << format_sci(rec.mass_series[i]) << ',' << rec.q_regime_series[i] << '\n';
}

void write_snapshot_csv(const Field& field, const std::string& path) {
    auto out = open_out(path);
    for (int i = 0; i < field.size(); ++i)
        out << format_sci(field.grid.node(i)) << ',' << format_sci(field[i]) << '\n';
}

void CsvTable::write(const std::string& path) const {
    auto out = open_out(path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? ',' : '\n');
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? ',' : '\n');
}

} // namespace gcs::cli
