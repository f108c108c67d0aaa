#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gcs/config.hpp"
#include "gcs/csv.hpp"
#include "gcs/fem.hpp"
#include "gcs/spectral.hpp"
#include "gcs/sweep.hpp"
#include "gcs/validate.hpp"

// gcselect: command-line front end for the division-mutation-selection
// laboratory.  Exit codes: 0 success, 1 config/I-O error, 2 threshold not
// reached, 3 validation failures.

namespace {

namespace fs = std::filesystem;
using namespace gcs;

// remaining "--key value" or "--key=value" tokens become config overrides
cli::KeyValues overrides_from(const std::vector<std::string>& extras) {
    cli::KeyValues out;
    for (std::size_t i = 0; i < extras.size(); ++i) {
        std::string tok = extras[i];
        if (tok.rfind("--", 0) != 0)
            throw cli::ConfigError("expected --key value, got '" + tok + "'");
        tok = tok.substr(2);
        auto eq = tok.find('=');
        if (eq != std::string::npos) {
            out.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
        } else {
            if (i + 1 >= extras.size())
                throw cli::ConfigError("override '--" + tok + "' is missing a value");
            out.emplace_back(tok, extras[++i]);
        }
    }
    for (const auto& [k, v] : out)
        if (std::find(cli::known_keys().begin(), cli::known_keys().end(), k) ==
            cli::known_keys().end())
            throw cli::ConfigError("unknown config key '" + k + "'");
    return out;
}

cli::RunConfig load(const std::string& config_path, const cli::KeyValues& overrides) {
    cli::KeyValues file_pairs;
    if (!config_path.empty()) file_pairs = cli::parse_config_file(config_path);
    return cli::build_config(file_pairs, overrides);
}

fs::path ensure_out(const std::string& out_dir) {
    fs::path dir(out_dir);
    fs::create_directories(dir);
    return dir;
}

int cmd_simulate(const cli::RunConfig& cfg, const std::string& out_dir) {
    auto dir = ensure_out(out_dir);
    auto rec = fem::run(cfg.initial_data(), cfg.params, cfg.fem_config());
    cli::write_timeseries_csv(rec, (dir / "timeseries.csv").string());
    for (const auto& [t, field] : rec.snapshots)
        cli::write_snapshot_csv(field,
                                (dir / ("snapshot_" + cli::format_time_tag(t) + ".csv")).string());
    if (rec.threshold_time) {
        std::cout << "threshold_time " << cli::format_sci(*rec.threshold_time) << "\n";
    } else {
        std::cout << "threshold not reached by t_max " << cli::format_sci(cfg.t_max) << "\n";
        if (cfg.stop_at_threshold) return 2;
    }
    if (!rec.positivity_guaranteed)
        std::cerr << "note: dt too large for the positivity (M-matrix) guarantee at this grid\n";
    return 0;
}

int cmd_spectrum(const cli::RunConfig& cfg, const std::string& out_dir) {
    auto dir = ensure_out(out_dir);
    Grid grid = cfg.grid();
    auto pairs = spectral::eigs_exact(cfg.params, cfg.modes, grid);
    auto asym = spectral::eigs_asymptotic(cfg.params, cfg.modes, grid);
    cli::CsvTable t;
    t.header = {"k", "lambda_exact", "lambda_asym", "abs_gap"};
    for (int k = 0; k < cfg.modes; ++k) {
        t.rows.push_back({std::to_string(k), cli::format_sci(pairs[k].lambda),
                          cli::format_sci(asym[k].lambda_first_order),
                          cli::format_sci(std::abs(pairs[k].lambda - asym[k].lambda_first_order))});
        cli::write_snapshot_csv(pairs[k].vector,
                                (dir / ("eigvec_" + std::to_string(k) + ".csv")).string());
    }
    t.write((dir / "spectrum.csv").string());
    return 0;
}

int cmd_sweep(const cli::RunConfig& cfg, const std::string& out_dir, int jobs) {
    auto dir = ensure_out(out_dir);
    auto rows = cli::run_sweep(cfg, jobs);
    cli::sweep_table(rows).write((dir / ("sweep_" + cfg.sweep_axis + ".csv")).string());
    int failures = 0;
    for (const auto& r : rows) failures += !r.errors.empty();
    if (failures > 0)
        std::cerr << "note: " << failures << " sweep point(s) recorded errors; see the errors column\n";
    return 0;
}

int cmd_validate(const cli::RunConfig& cfg, const std::string& out_dir) {
    auto dir = ensure_out(out_dir);
    validate::Options opt;
    auto touched = [&](const char* key) {
        return std::find(cfg.keys_set.begin(), cfg.keys_set.end(), key) != cfg.keys_set.end();
    };
    if (touched("dt")) opt.dt = cfg.dt;
    if (touched("n_cells")) opt.n_cells = cfg.n_cells;
    auto results = validate::run_all(opt, &std::cout);
    validate::print_table(results, std::cout);
    validate::results_table(results).write((dir / "validate.csv").string());
    return validate::all_passed(results) ? 0 : 3;
}

int default_jobs() {
    if (const char* env = std::getenv("GCSELECT_JOBS")) {
        int j = std::atoi(env);
        if (j >= 1) return j;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gcselect - numerical laboratory for a division-mutation-selection model"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    int jobs = default_jobs();

    std::vector<CLI::App*> subs;
    for (const char* name : {"simulate", "spectrum", "sweep", "validate"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->allow_extras();
        sub->add_option("--config", config_path, "flat key = value config file");
        sub->add_option("--out", out_dir, "output directory (default .)");
        sub->add_option("--jobs", jobs, "max concurrent sweep points (env GCSELECT_JOBS)");
        subs.push_back(sub);
    }
    subs[0]->description("advance the model, write timeseries.csv and snapshots");
    subs[1]->description("exact vs asymptotic spectrum, write spectrum.csv and eigenvectors");
    subs[2]->description("sweep eps | mu | rho0, write sweep_<axis>.csv");
    subs[3]->description("run the validation suite, write validate.csv");

    try {
        app.parse(argc, argv);
        CLI::App* active = app.get_subcommands().front();
        cli::RunConfig cfg = load(config_path, overrides_from(active->remaining()));
        if (active == subs[0]) return cmd_simulate(cfg, out_dir);
        if (active == subs[1]) return cmd_spectrum(cfg, out_dir);
        if (active == subs[2]) return cmd_sweep(cfg, out_dir, jobs);
        return cmd_validate(cfg, out_dir);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const fem::ThresholdUnreachable& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
