#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gcs/config.hpp"
#include "gcs/csv.hpp"

// Sweep driver: one axis (eps | mu | rho0), the fem crossing time plus every
// in-regime estimator and bound per point.  Points run concurrently up to a
// job limit; each point is an isolated single-threaded pipeline and rows are
// emitted in axis order, so the output bytes never depend on the schedule.

namespace gcs::cli {

struct SweepRow {
    double axis_value = 0.0;
    std::optional<double> t_fem;
    std::optional<double> t_spectral;
    std::optional<double> t_narrow_eps;
    std::optional<double> t_small_mu;
    std::optional<double> t_large_mu;
    std::optional<double> t_l;
    std::optional<double> t_u;
    std::string errors;
};

std::vector<SweepRow> run_sweep(const RunConfig& cfg, int jobs);
CsvTable sweep_table(const std::vector<SweepRow>& rows);

} // namespace gcs::cli
