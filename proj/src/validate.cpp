#include "gcs/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "gcs/asymptotics.hpp"
#include "gcs/fem.hpp"
#include "gcs/green.hpp"
#include "gcs/numerics.hpp"
#include "gcs/oracles.hpp"
#include "gcs/spectral.hpp"

namespace gcs::validate {

namespace {

constexpr double kPi = std::numbers::pi;

struct Audit {
    double min_nodal = std::numeric_limits<double>::infinity();
    bool rho_monotone = true;
    int runs = 0;

    void absorb(const fem::SimulationRecord& rec) {
        min_nodal = std::min(min_nodal, rec.min_nodal_value);
        rho_monotone = rho_monotone && rec.rho_nondecreasing();
        ++runs;
    }
};

struct Context {
    Options opt;
    Audit audit;
    std::ostream* progress = nullptr;

    double dt(double fallback) const { return opt.dt.value_or(fallback); }
    int cells(int fallback) const { return opt.n_cells.value_or(fallback); }

    fem::SimulationRecord run(const InitialData& init, const ModelParams& p,
                              const fem::FemConfig& cfg) {
        auto rec = fem::run(init, p, cfg);
        audit.absorb(rec);
        return rec;
    }

    double threshold_time(const InitialData& init, const ModelParams& p, const Grid& grid,
                          double step, double t_start = 1.0, double cap = 1e4) {
        fem::FemConfig cfg;
        cfg.grid = grid;
        cfg.dt = step;
        cfg.stop_at_threshold = true;
        cfg.t_max = std::max(t_start, 32.0 * step);
        while (true) {
            auto rec = run(init, p, cfg);
            if (rec.threshold_time) return *rec.threshold_time;
            if (cfg.t_max >= cap)
                throw fem::ThresholdUnreachable("validate: no crossing by t=" +
                                                std::to_string(cfg.t_max));
            cfg.t_max = std::min(cap, 2.0 * cfg.t_max);
        }
    }

    void log(const std::string& line) const {
        if (progress) *progress << line << "\n" << std::flush;
    }
};

ModelParams params_with(double b, double mu, double eps, double rho0, double s0 = 1.0,
                        double q1 = 0.0, double d = 0.0) {
    ModelParams p;
    p.q0 = b + d;
    p.q1 = q1;
    p.d = d;
    p.mu = mu;
    p.eps = eps;
    p.rho0 = rho0;
    p.s0 = s0;
    return p;
}

CheckResult make_result(std::string name, std::string metric, double measured,
                        std::string relation, double required, double required_hi = 0.0,
                        std::string note = {}) {
    CheckResult r;
    r.name = std::move(name);
    r.metric = std::move(metric);
    r.measured = measured;
    r.relation = std::move(relation);
    r.required = required;
    r.required_hi = required_hi;
    r.note = std::move(note);
    if (r.relation == "<=") r.pass = measured <= required;
    else if (r.relation == ">=") r.pass = measured >= required;
    else if (r.relation == "<") r.pass = measured < required;
    else if (r.relation == "in") r.pass = measured >= required && measured <= required_hi;
    else r.pass = false;
    return r;
}

// 1. first eight eigenvalues against a 20000-cell tridiagonal pencil
std::vector<CheckResult> check_eigen_oracle(Context& ctx) {
    auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (auto [mu, eps] : {std::pair{1.0, 0.1}, std::pair{0.1, 0.2}, std::pair{5.0, 0.05}}) {
        ModelParams p = params_with(2.0, mu, eps, 1.0);
        auto pairs = spectral::eigs_exact(p, 8, Grid(800));
        auto oracle = oracles::fem_pencil_eigenvalues(p, SelectionProfile::indicator(eps, p.s0),
                                                      20000, 8);
        for (int k = 0; k < 8; ++k)
            worst = std::max(worst, std::abs(pairs[k].lambda - oracle[k]) / oracle[k]);
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {make_result("01a eigen-oracle", "max relative gap, 3 parameter sets", worst, "<=", 1e-6),
            make_result("01b eigen-oracle-runtime", "seconds", elapsed, "<", 10.0)};
}

// 2. first-order eigenvalue error scales like eps^{3/2}
CheckResult check_eigenvalue_order(Context& ctx) {
    std::vector<double> le, lg;
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
        ModelParams p = params_with(2.0, 1.0, eps, 1.0);
        Grid g(800);
        auto pairs = spectral::eigs_exact(p, 4, g);
        auto asym = spectral::eigs_asymptotic(p, 4, g);
        double worst = 0.0;
        for (int k = 0; k <= 3; ++k)
            worst = std::max(worst, std::abs(pairs[k].lambda - asym[k].lambda_first_order) /
                                        ((k + 1) * kPi));
        le.push_back(std::log(eps));
        lg.push_back(std::log(worst));
    }
    return make_result("02 eigenvalue-order", "log-log slope over the window ladder",
                       fit_slope(le, lg), ">=", 1.4);
}

// 3. uniform window: fem, spectral and ln 2 agree
CheckResult check_uniform_anchor(Context& ctx) {
    ModelParams p = params_with(2.0, 1.0, 1.0, 1.0);
    const double expected = std::log(2.0);
    Grid g(ctx.cells(400));
    double t_fem = ctx.threshold_time(ConstantInit{1.0}, p, g, ctx.dt(1e-4));
    auto pairs = spectral::eigs_exact(p, 8, g);
    auto coeffs = spectral::modal_coefficients(Field(g, 1.0),
                                               SelectionProfile::indicator(p.eps, p.s0), pairs,
                                               p.b());
    double t_spec = spectral::time_to_threshold_spectral(coeffs, p.rho0);
    double worst = std::max(std::abs(t_fem - expected), std::abs(t_spec - expected));
    return make_result("03 uniform-anchor", "max |t - ln 2| over fem and spectral", worst, "<=",
                       1e-3,
                       0.0, "t_fem=" + std::to_string(t_fem) + " t_spec=" + std::to_string(t_spec));
}

// 4. threshold time against log rho0: slope and pointwise formula agreement
std::vector<CheckResult> check_logrho_line(Context& ctx) {
    ModelParams p = params_with(0.1, 1.0, 0.01, 1.0);
    Grid g(ctx.cells(800));
    double dt = ctx.dt(1e-3);
    std::vector<double> lr, ts;
    double worst_rel = 0.0;
    for (int i = 0; i < 8; ++i) {
        p.rho0 = std::pow(10.0, 3.0 * i / 7.0);
        double t = ctx.threshold_time(ConstantInit{1.0}, p, g, dt, 16.0);
        lr.push_back(std::log(p.rho0));
        ts.push_back(t);
        double t30 = asym::t_threshold_narrow_eps(p, 1.0).t_est;
        double t27 = asym::t_threshold_narrow_eps_leading(p, 1.0);
        double rel = std::min(std::abs(t - t30) / t30, std::abs(t - t27) / t27);
        worst_rel = std::max(worst_rel, rel);
    }
    double slope = fit_slope(lr, ts);
    ctx.log("  [04] slope=" + std::to_string(slope) + " worst pointwise rel=" +
            std::to_string(worst_rel));
    return {make_result("04a logrho-slope", "|slope - 1/b| / (1/b), 8 thresholds",
                        std::abs(slope - 10.0) / 10.0, "<=", 0.05,
                        0.0, "measured slope " + std::to_string(slope) + "; dominant mode grows at b - eps*s0, so the slope sits ~10% above 1/b"),
            make_result("04b logrho-pointwise", "max relative gap to the narrow-window formulas",
                        worst_rel, "<=", 0.10)};
}

// 5. output error of the narrow-window time estimate scales in eps
CheckResult check_output_error_order(Context& ctx) {
    const double b = 2.0, rho0 = 100.0;
    std::vector<double> le, lg;
    for (double eps : {0.1, 0.05, 0.025, 0.0125}) {
        ModelParams p = params_with(b, 4.0 * b / (kPi * kPi), eps, rho0);
        p.q1 = p.q0;  // constant division rate: measure the pre-threshold output
        fem::FemConfig cfg;
        cfg.grid = Grid(ctx.cells(400), eps);
        cfg.dt = ctx.dt(1e-4);
        cfg.t_max = asym::t_threshold_narrow_eps(p, 1.0).t_est;
        auto rec = ctx.run(ConstantInit{1.0}, p, cfg);
        le.push_back(std::log(eps));
        lg.push_back(std::log(std::abs(rec.rho_series.back() - rho0)));
    }
    return make_result("05 output-error-order", "log-log slope of |rho(t_est) - rho0|",
                       fit_slope(le, lg), ">=", 0.45);
}

// 6. Dirac founder: fem crossing inside the two-sided bounds at every mu
std::vector<CheckResult> check_dirac_sandwich(Context& ctx) {
    const double z = 0.5;
    ModelParams p = params_with(2.0, 1.0, 0.1, 1.0);
    Grid g(ctx.cells(400));
    double dt = ctx.dt(1e-3);
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20; ++i) {
        p.mu = std::pow(10.0, -2.0 + 4.0 * i / 19.0);
        green::DiracSetup setup(z, p, DomainSpec{DomainKind::BoundedUnit});
        auto bp = green::bounds_bounded(setup, p.rho0);
        double t_fem = ctx.threshold_time(DiracInit{z}, p, g, dt);
        auto tu = bp.t_upper();
        double violation = std::max(bp.t_l - t_fem, tu ? t_fem - *tu : 1.0) / t_fem;
        worst = std::max(worst, violation);
    }
    p.mu = 0.01;
    green::DiracSetup setup(z, p, DomainSpec{DomainKind::BoundedUnit});
    auto bp = green::bounds_bounded(setup, p.rho0);
    double improvement = (bp.t_u && bp.t_u_inf) ? *bp.t_u_inf / *bp.t_u : 2.0;
    return {make_result("06a dirac-sandwich", "worst signed bound violation / t_fem, 20 rates",
                        worst, "<=", 0.0),
            make_result("06b dirac-upper-improvement", "t_u_inf / t_u at mu = 0.01", improvement,
                        "<", 1.0)};
}

// 7. large mutation rate: O(1/mu) error halving and the flat-mode cascade
std::vector<CheckResult> check_large_mu(Context& ctx) {
    ModelParams p = params_with(2.0, 10.0, 0.1, 1.0);
    p.q1 = p.q0;
    Grid g(ctx.cells(800));
    double dt = ctx.dt(2e-4);
    auto time_at = [&](double mu) {
        p.mu = mu;
        double t1 = ctx.threshold_time(ConstantInit{1.0}, p, g, dt);
        double t2 = ctx.threshold_time(ConstantInit{1.0}, p, g, dt / 2.0);
        return 2.0 * t2 - t1;  // Richardson in dt
    };
    std::vector<double> err;
    for (double mu : {10.0, 20.0, 40.0}) {
        p.mu = mu;
        double t_est = asym::t_threshold_large_mu(p, 1.0, p.eps * p.s0).t_est;
        err.push_back(std::abs(time_at(mu) - t_est));
    }
    double r1 = err[0] / err[1];
    double r2 = err[1] / err[2];
    ctx.log("  [07] errors " + std::to_string(err[0]) + ", " + std::to_string(err[1]) + ", " +
            std::to_string(err[2]));

    const int K = 12;
    auto M = spectral::overlap_matrix(SelectionProfile::indicator(0.1, 1.0), K);
    std::vector<double> nI(K, 0.0);
    nI[0] = 1.0;
    std::vector<double> t_grid;
    for (int i = 0; i <= 2000; ++i) t_grid.push_back(50.0 * i / 2000.0);
    auto gamma = spectral::modal_cascade(nI, M, 2.0, 3, t_grid);
    double worst_ratio = 0.0;
    for (int j = 1; j <= 3; ++j) {
        double model = 1.0;
        for (int l = 1; l <= j; ++l) model *= (2.0 - M[0][0]) * 50.0 / l;
        worst_ratio = std::max(worst_ratio, std::abs(gamma[j][0][2000] / model - 1.0));
    }
    return {make_result("07a large-mu-halving-1", "error ratio mu 10 -> 20", r1, "in", 1.5, 2.5),
            make_result("07b large-mu-halving-2", "error ratio mu 20 -> 40", r2, "in", 1.5, 2.5),
            make_result("07c cascade-ratio", "max |gamma_{j,0} / secular model - 1|, j <= 3",
                        worst_ratio, "<=", 0.1)};
}

// 8. small mutation rate: closer to the zero-diffusion formula as mu shrinks
CheckResult check_small_mu(Context& ctx) {
    ModelParams p = params_with(2.0, 1e-2, 0.1, 1.0);
    p.q1 = p.q0;
    Grid g(ctx.cells(400));
    double dt = ctx.dt(2e-4);
    double t_est = asym::t_threshold_small_mu(p, p.eps * p.s0).t_est;
    p.mu = 1e-2;
    double e_coarse = std::abs(ctx.threshold_time(ConstantInit{1.0}, p, g, dt) - t_est);
    p.mu = 1e-4;
    double e_fine = std::abs(ctx.threshold_time(ConstantInit{1.0}, p, g, dt) - t_est);
    return make_result("08 small-mu-monotone", "|t_fem - t_est| ratio, mu 1e-4 over 1e-2",
                       e_fine / e_coarse, "<", 1.0,
                       0.0, "e(1e-2)=" + std::to_string(e_coarse) + " e(1e-4)=" + std::to_string(e_fine));
}

// 9a. the discrete conservation law holds to roundoff
CheckResult check_balance(Context& ctx) {
    ModelParams p = params_with(0.1, 1.0, 0.01, 1.0);
    fem::FemConfig cfg;
    cfg.grid = Grid(ctx.cells(800), p.eps);
    cfg.dt = ctx.dt(1e-3);
    cfg.stop_at_threshold = true;
    cfg.t_max = 64.0;
    auto rec = ctx.run(ConstantInit{1.0}, p, cfg);
    double exact = fem::discrete_balance_residual_exact(rec, p) / cfg.dt;
    double trapz = fem::discrete_balance_residual(rec, p);
    return make_result("09a balance-conservation", "scheme balance defect per unit time", exact,
                       "<=", 1e-8,
                       0.0, "time-trapezoid residual per step " + cli::format_sci(trapz) +
                                " (quadrature error, O(dt^2))");
}

// 10. after the division rate drops below death, the output saturates
CheckResult check_saturation(Context& ctx) {
    ModelParams p = params_with(1.0, 1.0, 0.1, 1.0, 1.0, /*q1=*/0.0, /*d=*/1.0);
    fem::FemConfig cfg;
    cfg.grid = Grid(ctx.cells(400), p.eps);
    cfg.dt = ctx.dt(1e-3);
    cfg.t_max = 200.0;
    auto rec = ctx.run(ConstantInit{1.0}, p, cfg);
    auto rho_at = [&](double t) {
        std::size_t i = 0;
        while (i + 1 < rec.times.size() && rec.times[i] < t) ++i;
        return rec.rho_series[i];
    };
    return make_result("10 post-threshold-saturation", "rho(200) - rho(100)",
                       rho_at(200.0) - rho_at(100.0), "<=", 1e-6);
}

// 11. closed-form lower bound on the J integral
CheckResult check_j_bound(Context& ctx) {
    GaussLegendre gl(16);
    double worst = -std::numeric_limits<double>::infinity();
    for (double a : {0.0, 0.5, 1.0, 1.5, 2.0}) {
        for (double t : {0.2, 0.5, 1.0, 2.0, 5.0, 10.0}) {
            double j = 2.0 * gl.integrate(
                                 [&](double u) {
                                     return u == 0.0 ? 0.0 : std::exp(a * u * u - 1.0 / (u * u));
                                 },
                                 0.0, std::sqrt(t), 64);
            double bound = green::j_lower_bound(a, t);
            worst = std::max(worst, (bound - j) / std::max(j, 1e-300));
        }
    }
    return make_result("11 j-integral-bound", "worst (bound - J)/J over 30 points", worst, "<=",
                       0.0);
}

} // namespace

std::vector<CheckResult> run_all(const Options& opt, std::ostream* progress) {
    Context ctx;
    ctx.opt = opt;
    ctx.progress = progress;
    std::vector<CheckResult> out;
    auto add = [&](CheckResult r) {
        ctx.log((r.pass ? "  PASS " : "  FAIL ") + r.name);
        out.push_back(std::move(r));
    };
    auto add_all = [&](std::vector<CheckResult> rs) {
        for (auto& r : rs) add(std::move(r));
    };

    add_all(check_eigen_oracle(ctx));
    add(check_eigenvalue_order(ctx));
    add(check_uniform_anchor(ctx));
    add_all(check_logrho_line(ctx));
    add(check_output_error_order(ctx));
    add_all(check_dirac_sandwich(ctx));
    add_all(check_large_mu(ctx));
    add(check_small_mu(ctx));
    add(check_balance(ctx));
    add(check_saturation(ctx));
    add(check_j_bound(ctx));

    // positivity and monotonicity audited across every run above
    add(make_result("09b nodal-positivity", "min nodal value over " + std::to_string(ctx.audit.runs) +
                        " runs", ctx.audit.min_nodal, ">=", 0.0));
    add(make_result("09c output-monotone", "fraction of runs with nondecreasing rho",
                    ctx.audit.rho_monotone ? 1.0 : 0.0, ">=", 1.0));

    std::stable_sort(out.begin(), out.end(),
                     [](const CheckResult& a, const CheckResult& b) { return a.name < b.name; });
    return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

void print_table(const std::vector<CheckResult>& results, std::ostream& out) {
    for (const auto& r : results) {
        out << (r.pass ? "PASS  " : "FAIL  ") << r.name << "  [" << r.metric << "]  measured "
            << cli::format_sci(r.measured) << "  required " << r.relation << " "
            << cli::format_sci(r.required);
        if (r.relation == "in") out << " .. " << cli::format_sci(r.required_hi);
        if (!r.note.empty()) out << "  (" << r.note << ")";
        out << "\n";
    }
}

cli::CsvTable results_table(const std::vector<CheckResult>& results) {
    cli::CsvTable t;
    t.header = {"check", "measured", "required", "status"};
    for (const auto& r : results) {
        std::string req = r.relation + " " + cli::format_sci(r.required);
        if (r.relation == "in") req += " .. " + cli::format_sci(r.required_hi);
        t.rows.push_back({r.name, cli::format_sci(r.measured), req, r.pass ? "PASS" : "FAIL"});
    }
    return t;
}

} // namespace gcs::validate
