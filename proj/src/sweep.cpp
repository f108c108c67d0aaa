#include "gcs/sweep.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "gcs/asymptotics.hpp"
#include "gcs/fem.hpp"
#include "gcs/green.hpp"
#include "gcs/spectral.hpp"

namespace gcs::cli {

namespace {

void note_error(SweepRow& row, const std::string& what, const std::exception& e) {
    if (!row.errors.empty()) row.errors += "; ";
    row.errors += what + ": " + e.what();
}

SweepRow evaluate_point(const RunConfig& base, double value) {
    SweepRow row;
    row.axis_value = value;

    RunConfig cfg = base;
    if (cfg.sweep_axis == "eps") cfg.params.eps = value;
    else if (cfg.sweep_axis == "mu") cfg.params.mu = value;
    else if (cfg.sweep_axis == "rho0") cfg.params.rho0 = value;
    else throw ConfigError("sweep_axis must be eps, mu or rho0");

    const ModelParams& p = cfg.params;
    Grid grid(cfg.n_cells);
    if (!grid.resolves(p.eps)) {
        row.errors = "grid: window unresolved at this eps";
        return row;
    }
    Field n_init = realize_initial(cfg.initial_data(), grid);
    auto profile = SelectionProfile::indicator(p.eps, p.s0);

    try {
        row.t_fem = fem::time_to_threshold_numeric(cfg.initial_data(), p, grid, cfg.dt);
    } catch (const std::exception& e) {
        note_error(row, "t_fem", e);
    }
    try {
        auto pairs = spectral::eigs_exact(p, cfg.modes, grid);
        auto coeffs = spectral::modal_coefficients(n_init, profile, pairs, p.b());
        row.t_spectral = spectral::time_to_threshold_spectral(coeffs, p.rho0);
    } catch (const std::exception& e) {
        note_error(row, "t_spectral", e);
    }
    try {
        auto est = asym::t_threshold_narrow_eps(p, mass(n_init));
        if (est.in_regime) row.t_narrow_eps = est.t_est;
    } catch (const std::exception&) {
        // out of regime (b <= 0): column stays empty
    }
    try {
        auto est = asym::t_threshold_small_mu(p, weighted_mass(profile, n_init));
        if (est.in_regime) row.t_small_mu = est.t_est;
    } catch (const std::exception&) {
    }
    try {
        auto est = asym::t_threshold_large_mu(p, mass(n_init), p.eps * p.s0);
        if (est.in_regime) row.t_large_mu = est.t_est;
    } catch (const std::exception&) {
    }
    if (std::holds_alternative<DiracInit>(cfg.initial_data())) {
        try {
            green::DiracSetup setup(cfg.dirac_z, p, DomainSpec{DomainKind::BoundedUnit});
            auto bp = green::bounds_bounded(setup, p.rho0);
            row.t_l = bp.t_l;
            auto tu = bp.t_upper();
            if (tu && std::isfinite(*tu)) row.t_u = *tu;
        } catch (const std::exception& e) {
            note_error(row, "bounds", e);
        }
    }
    return row;
}

} // namespace

std::vector<SweepRow> run_sweep(const RunConfig& cfg, int jobs) {
    const std::vector<double> values = cfg.sweep_values();
    std::vector<SweepRow> rows(values.size());
    if (jobs < 1) jobs = 1;
    jobs = std::min<int>(jobs, static_cast<int>(values.size()));

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= values.size()) return;
            try {
                rows[i] = evaluate_point(cfg, values[i]);
            } catch (const std::exception& e) {
                rows[i].axis_value = values[i];
                rows[i].errors = e.what();
            }
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return rows;
}

CsvTable sweep_table(const std::vector<SweepRow>& rows) {
    CsvTable t;
    t.header = {"axis_value", "t_fem",      "t_spectral", "t_narrow_eps", "t_small_mu",
                "t_large_mu", "t_l",        "t_u",        "errors"};
    auto cell = [](const std::optional<double>& v) { return v ? format_sci(*v) : std::string{}; };
    for (const auto& r : rows)
        t.rows.push_back({format_sci(r.axis_value), cell(r.t_fem), cell(r.t_spectral),
                          cell(r.t_narrow_eps), cell(r.t_small_mu), cell(r.t_large_mu),
                          cell(r.t_l), cell(r.t_u), r.errors});
    return t;
}

} // namespace gcs::cli
