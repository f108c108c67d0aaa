#pragma once

#include <string>
#include <vector>

#include "gcs/fem.hpp"

// CSV emission with fixed %.12e float formatting and LF line endings, so
// seeded runs reproduce byte-identical files.

namespace gcs::cli {

std::string format_sci(double v);  // %.12e
std::string format_time_tag(double t);  // compact tag for file names

void write_timeseries_csv(const fem::SimulationRecord& rec, const std::string& path);
void write_snapshot_csv(const Field& field, const std::string& path);  // x,n rows, no header

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    void write(const std::string& path) const;
};

} // namespace gcs::cli
