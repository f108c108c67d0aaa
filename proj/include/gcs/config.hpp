#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "gcs/core.hpp"
#include "gcs/fem.hpp"

// Flat key = value run configuration.  A config file plus command-line
// overrides (override wins) map onto model, grid, time stepping, initial
// data and sweep settings.  Unknown keys are errors, not warnings.

namespace gcs::cli {

struct RunConfig {
    ModelParams params;
    int n_cells = 400;
    double dt = 1e-3;
    double t_max = 10.0;
    bool stop_at_threshold = false;
    std::vector<double> snapshot_times;

    std::string initial = "constant";  // constant | random | dirac
    double initial_value = 1.0;
    std::uint64_t random_seed = 1;
    double random_lower = 0.0;
    double random_upper = 1.0;
    double dirac_z = 0.5;

    int modes = 64;  // spectral truncation

    std::string sweep_axis = "mu";  // eps | mu | rho0
    double sweep_start = 1e-2;
    double sweep_stop = 1e2;
    int sweep_count = 20;
    std::string sweep_spacing = "log";  // lin | log

    std::vector<std::string> keys_set;  // which keys file/overrides actually touched

    InitialData initial_data() const;
    Grid grid() const { return Grid(n_cells); }
    fem::FemConfig fem_config() const;
    std::vector<double> sweep_values() const;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses "key = value" lines; '#' starts a comment; blank lines ignored.
KeyValues parse_config_text(const std::string& text);
KeyValues parse_config_file(const std::string& path);

/// Applies pairs in order onto the defaults; later pairs win.  Throws
/// ConfigError on unknown keys or malformed values.
RunConfig build_config(const KeyValues& file_pairs, const KeyValues& overrides = {});

const std::vector<std::string>& known_keys();

} // namespace gcs::cli
