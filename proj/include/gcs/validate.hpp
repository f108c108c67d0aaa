#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gcs/csv.hpp"

// Acceptance suite: every check pins its parameters and tolerance in code and
// reports one pass/fail line.  dt / n_cells can be overridden (the validate
// command forwards config overrides), which deliberately lets a coarse dt act
// as a negative control for the convergence-sensitive checks.

namespace gcs::validate {

struct CheckResult {
    std::string name;
    std::string metric;
    double measured = 0.0;
    std::string relation;  // "<=", ">=", "<", "in"
    double required = 0.0;
    double required_hi = 0.0;  // used by "in"
    bool pass = false;
    std::string note;
};

struct Options {
    std::optional<double> dt;
    std::optional<int> n_cells;
};

std::vector<CheckResult> run_all(const Options& opt = {}, std::ostream* progress = nullptr);

bool all_passed(const std::vector<CheckResult>& results);
void print_table(const std::vector<CheckResult>& results, std::ostream& out);
cli::CsvTable results_table(const std::vector<CheckResult>& results);

} // namespace gcs::validate
