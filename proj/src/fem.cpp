#include "gcs/fem.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

namespace gcs::fem {

std::vector<double> TriMat::apply(const std::vector<double>& x) const {
    const int n = size();
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) v += off[i - 1] * x[i - 1];
        if (i + 1 < n) v += off[i] * x[i + 1];
        y[i] = v;
    }
    return y;
}

double TriMat::quad_form_ones(const std::vector<double>& x) const {
    const int n = size();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += diag[i] * x[i];
        if (i + 1 < n) acc += off[i] * (x[i] + x[i + 1]);
    }
    return acc;
}

TriFactor TriFactor::factor(const std::vector<double>& sub, const std::vector<double>& diag,
                            const std::vector<double>& sup) {
    const int n = static_cast<int>(diag.size());
    TriFactor f;
    f.low.resize(n - 1);
    f.diag = diag;
    f.up = sup;
    for (int i = 0; i + 1 < n; ++i) {
        if (f.diag[i] == 0.0) throw NumericalFailure("tridiagonal factorization: zero pivot");
        f.low[i] = sub[i] / f.diag[i];
        f.diag[i + 1] -= f.low[i] * f.up[i];
    }
    if (f.diag[n - 1] == 0.0) throw NumericalFailure("tridiagonal factorization: zero pivot");
    return f;
}

void TriFactor::solve(std::vector<double>& rhs) const {
    const int n = static_cast<int>(diag.size());
    for (int i = 1; i < n; ++i) rhs[i] -= low[i - 1] * rhs[i - 1];
    rhs[n - 1] /= diag[n - 1];
    for (int i = n - 2; i >= 0; --i) rhs[i] = (rhs[i] - up[i] * rhs[i + 1]) / diag[i];
}

OperatorMatrices assemble(const Grid& grid, const ModelParams& params, const SelectionProfile& s) {
    params.validate();
    if (!grid.resolves(params.eps))
        throw std::invalid_argument("assemble: grid does not resolve the selection window");
    const int nn = grid.n_nodes();
    const double h = grid.h;
    OperatorMatrices mats{grid, {}, {}, {}, s};

    mats.mass.diag.assign(nn, 2.0 * h / 3.0);
    mats.mass.diag.front() = mats.mass.diag.back() = h / 3.0;
    mats.mass.off.assign(nn - 1, h / 6.0);

    mats.stiffness.diag.assign(nn, 2.0 * params.mu / h);
    mats.stiffness.diag.front() = mats.stiffness.diag.back() = params.mu / h;
    mats.stiffness.off.assign(nn - 1, -params.mu / h);

    // S: per cell, split at profile breakpoints so the piecewise-constant s is
    // integrated exactly against the P1 hat products.
    mats.selection.diag.assign(nn, 0.0);
    mats.selection.off.assign(nn - 1, 0.0);
    const auto& edges = s.edges();
    const auto& vals = s.values();
    for (int c = 0; c < grid.n_cells; ++c) {
        const double xl = grid.node(c);
        const double xr = grid.node(c + 1);
        for (std::size_t j = 0; j < vals.size(); ++j) {
            if (vals[j] == 0.0) continue;
            double a = std::max(xl, edges[j]);
            double b = std::min(xr, edges[j + 1]);
            if (b <= a) continue;
            // local coordinates t in [t0,t1] within the cell
            double t0 = (a - xl) / h;
            double t1 = (b - xl) / h;
            auto ipow = [](double t, int p) {
                double r = t;
                for (int k = 1; k < p; ++k) r *= t;
                return r;
            };
            // integrals of (1-t)^2, t(1-t), t^2 over [t0,t1], scaled by h
            double i00 = ((1.0 - ipow(1.0 - t1, 3)) - (1.0 - ipow(1.0 - t0, 3))) / 3.0;
            double i11 = (ipow(t1, 3) - ipow(t0, 3)) / 3.0;
            double i01 = (ipow(t1, 2) - ipow(t0, 2)) / 2.0 - i11;
            mats.selection.diag[c] += vals[j] * h * i00;
            mats.selection.diag[c + 1] += vals[j] * h * i11;
            mats.selection.off[c] += vals[j] * h * i01;
        }
    }
    return mats;
}

StepOperator::StepOperator(const OperatorMatrices& mats, const ModelParams& params, double dt,
                           double q)
    : mats_(&mats), dt_(dt), q_(q) {
    if (!(dt > 0.0)) throw std::invalid_argument("StepOperator: dt must be > 0");
    const int nn = mats.grid.n_nodes();
    const double c = 1.0 + dt * (params.d - q);
    std::vector<double> diag(nn), off(nn - 1);
    for (int i = 0; i < nn; ++i)
        diag[i] = c * mats.mass.diag[i] + dt * (mats.stiffness.diag[i] + mats.selection.diag[i]);
    m_matrix_ = true;
    for (int i = 0; i + 1 < nn; ++i) {
        off[i] = c * mats.mass.off[i] + dt * (mats.stiffness.off[i] + mats.selection.off[i]);
        if (off[i] > 0.0) m_matrix_ = false;
    }
    factor_ = TriFactor::factor(off, diag, off);
}

std::pair<Field, double> StepOperator::advance(const Field& state, double rho) const {
    std::vector<double> rhs = mats_->mass.apply(state.values);
    factor_.solve(rhs);
    // flush a numerically extinct population to exact zero; subnormal nodal
    // values would otherwise poison the throughput of long decaying runs
    for (double& v : rhs)
        if (std::abs(v) < 1e-290) v = 0.0;
    Field next(state.grid, std::move(rhs));
    double wm_old = weighted_mass(mats_->profile, state);
    double wm_new = weighted_mass(mats_->profile, next);
    double rho_new = rho + dt_ * 0.5 * (wm_old + wm_new);
    return {std::move(next), rho_new};
}

std::pair<Field, double> step(const Field& state, double rho, const ModelParams& params,
                              const OperatorMatrices& mats, double dt) {
    if (rho < 0.0) throw std::invalid_argument("step: rho must be >= 0");
    StepOperator op(mats, params, dt, params.q_of_rho(rho));
    return op.advance(state, rho);
}

bool SimulationRecord::rho_nondecreasing() const {
    for (std::size_t i = 1; i < rho_series.size(); ++i)
        if (rho_series[i] < rho_series[i - 1]) return false;
    return true;
}

namespace {

struct SeriesAccumulator {
    SimulationRecord& rec;
    const SelectionProfile& profile;

    void push(double t, const Field& n, double rho, int regime) {
        rec.times.push_back(t);
        rec.rho_series.push_back(rho);
        double m = 0.0, nrm2 = 0.0, mn = n[0];
        const int nc = n.grid.n_cells;
        for (int i = 0; i <= nc; ++i) {
            double w = (i == 0 || i == nc) ? 0.5 : 1.0;
            m += w * n[i];
            nrm2 += w * n[i] * n[i];
            mn = std::min(mn, n[i]);
        }
        rec.mass_series.push_back(m * n.grid.h);
        rec.l2_series.push_back(std::sqrt(nrm2 * n.grid.h));
        rec.selection_series.push_back(weighted_mass(profile, n));
        rec.q_regime_series.push_back(regime);
        rec.min_nodal_value = std::min(rec.min_nodal_value, mn);
        if (std::isnan(m))
            throw NumericalFailure("fem::run: NaN detected at step " +
                                   std::to_string(rec.times.size() - 1) + " (t=" +
                                   std::to_string(t) + ")");
    }
};

Field lerp_field(const Field& a, const Field& b, double theta) {
    Field out = a;
    for (int i = 0; i < out.size(); ++i) out[i] = (1.0 - theta) * a[i] + theta * b[i];
    return out;
}

} // namespace

SimulationRecord run(const InitialData& initial, const ModelParams& params, const FemConfig& config) {
    params.validate();
    if (!(config.dt > 0.0 && config.t_max > 0.0))
        throw std::invalid_argument("run: dt and t_max must be > 0");

    SelectionProfile profile = SelectionProfile::indicator(params.eps, params.s0);
    OperatorMatrices mats = assemble(config.grid, params, profile);

    Field state = realize_initial(initial, config.grid);
    if (state.has_nan()) throw NumericalFailure("fem::run: NaN in initial data");

    std::vector<double> snap_times = config.snapshot_times;
    std::sort(snap_times.begin(), snap_times.end());
    std::size_t next_snap = 0;

    SimulationRecord rec;
    rec.min_nodal_value = state.values.empty() ? 0.0 : state.values[0];
    SeriesAccumulator acc{rec, mats.profile};

    double t = 0.0;
    double rho = 0.0;
    int regime = 0;
    StepOperator op0(mats, params, config.dt, params.q0);
    StepOperator op1(mats, params, config.dt, params.q1);
    rec.positivity_guaranteed = op0.positivity_guaranteed() && op1.positivity_guaranteed();

    acc.push(t, state, rho, regime);
    while (next_snap < snap_times.size() && snap_times[next_snap] <= t) {
        rec.snapshots.emplace_back(t, state);
        ++next_snap;
    }

    const double t_end = config.t_max;
    while (t < t_end - 1e-12 * t_end) {
        double dt = std::min(config.dt, t_end - t);
        const StepOperator* op = (regime == 0) ? &op0 : &op1;
        std::unique_ptr<StepOperator> partial;
        if (dt != config.dt) {
            partial = std::make_unique<StepOperator>(mats, params, dt,
                                                     regime == 0 ? params.q0 : params.q1);
            op = partial.get();
        }
        auto [next, rho_next] = op->advance(state, rho);

        if (regime == 0 && rho < params.rho0 && rho_next >= params.rho0) {
            // locate the crossing by linear interpolation of rho inside the step
            double theta = (params.rho0 - rho) / (rho_next - rho);
            double t_cross = t + theta * dt;
            Field cross_state = lerp_field(state, next, theta);
            rec.threshold_time = t_cross;
            acc.push(t_cross, cross_state, params.rho0, 1);
            rec.crossing_index = static_cast<int>(rec.times.size()) - 1;
            while (next_snap < snap_times.size() && snap_times[next_snap] <= t_cross) {
                double ts = snap_times[next_snap];
                double th = (ts - t) / dt;
                rec.snapshots.emplace_back(ts, lerp_field(state, next, th));
                ++next_snap;
            }
            if (config.stop_at_threshold) {
                rec.final_state = std::move(cross_state);
                return rec;
            }
            regime = 1;
            t = t_cross;
            rho = params.rho0;
            state = std::move(cross_state);
            continue;
        }

        while (next_snap < snap_times.size() && snap_times[next_snap] <= t + dt) {
            double ts = snap_times[next_snap];
            double th = (ts - t) / dt;
            rec.snapshots.emplace_back(ts, lerp_field(state, next, th));
            ++next_snap;
        }
        t += dt;
        rho = rho_next;
        state = std::move(next);
        acc.push(t, state, rho, regime);
    }
    rec.final_state = std::move(state);
    return rec;
}

static double q_value(const ModelParams& params, int regime) {
    return regime == 0 ? params.q0 : params.q1;
}

double discrete_balance_residual(const SimulationRecord& rec, const ModelParams& params) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < rec.times.size(); ++i) {
        if (rec.crossing_index && static_cast<int>(i + 1) == *rec.crossing_index) continue;
        double dt = rec.times[i + 1] - rec.times[i];
        double lhs = (rec.mass_series[i + 1] + rec.rho_series[i + 1]) -
                     (rec.mass_series[i] + rec.rho_series[i]);
        double rhs = dt * (q_value(params, rec.q_regime_series[i]) - params.d) * 0.5 *
                     (rec.mass_series[i] + rec.mass_series[i + 1]);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

double discrete_balance_residual_exact(const SimulationRecord& rec, const ModelParams& params) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < rec.times.size(); ++i) {
        if (rec.crossing_index && static_cast<int>(i + 1) == *rec.crossing_index) continue;
        double dt = rec.times[i + 1] - rec.times[i];
        double defect = rec.mass_series[i + 1] - rec.mass_series[i] +
                        dt * rec.selection_series[i + 1] -
                        dt * (q_value(params, rec.q_regime_series[i]) - params.d) *
                            rec.mass_series[i + 1];
        worst = std::max(worst, std::abs(defect));
    }
    return worst;
}

double time_to_threshold_numeric(const InitialData& initial, const ModelParams& params,
                                 const Grid& grid, double dt, double t_cap) {
    FemConfig config;
    config.grid = grid;
    config.dt = dt;
    config.stop_at_threshold = true;
    config.t_max = std::max(1.0, 32.0 * dt);
    while (true) {
        SimulationRecord rec = run(initial, params, config);
        if (rec.threshold_time) return *rec.threshold_time;
        if (params.d > params.q0) {
            // pre-threshold decay: all future gain is bounded by
            // s0 * n_bar(t) / (d - q0), so the verdict can come early
            double future = params.s0 * rec.mass_series.back() / (params.d - params.q0);
            if (rec.rho_series.back() + future < params.rho0)
                throw ThresholdUnreachable(
                    "time_to_threshold_numeric: threshold provably unreachable (rho saturates at <= " +
                    std::to_string(rec.rho_series.back() + future) + ")");
        }
        if (config.t_max >= t_cap)
            throw ThresholdUnreachable("time_to_threshold_numeric: rho did not reach rho0 by t=" +
                                       std::to_string(config.t_max));
        config.t_max = std::min(t_cap, 2.0 * config.t_max);
    }
}

} // namespace gcs::fem
