#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "gcs/core.hpp"

// Direct solver for the division-mutation-selection equation
//   dn/dt = (Q(rho) - d - s(x)) n + mu n_xx,   n_x = 0 at x in {0,1},
//   rho(t) = integral_0^t integral s(x) n(tau,x) dx dtau,
// with P1 finite elements in trait and implicit Euler in time.  The scalar
// nonlinearity Q is piecewise constant, so it is frozen at the step start and
// the single crossing step is re-split at the interpolated crossing time.

namespace gcs::fem {

/// Symmetric tridiagonal matrix (sub == sup), n_nodes rows.
struct TriMat {
    std::vector<double> diag;
    std::vector<double> off;  // off[i] couples rows i and i+1

    int size() const { return static_cast<int>(diag.size()); }
    std::vector<double> apply(const std::vector<double>& x) const;
    double quad_form_ones(const std::vector<double>& x) const;  // 1^T A x
};

/// LU factorization of a (generally nonsymmetric) tridiagonal system,
/// Thomas algorithm without pivoting.
struct TriFactor {
    std::vector<double> low;   // multipliers
    std::vector<double> diag;  // pivots
    std::vector<double> up;

    static TriFactor factor(const std::vector<double>& sub, const std::vector<double>& diag,
                            const std::vector<double>& sup);
    void solve(std::vector<double>& rhs) const;
};

struct OperatorMatrices {
    Grid grid;
    TriMat mass;       // consistent P1 mass matrix M
    TriMat stiffness;  // mu-weighted K, Neumann (zero row sums)
    TriMat selection;  // P1 mass matrix weighted by s, breakpoint-split
    SelectionProfile profile;
};

OperatorMatrices assemble(const Grid& grid, const ModelParams& params, const SelectionProfile& s);

/// Implicit-Euler step operator for a fixed division rate q:
///   (M + dt (K + S + (d - q) M)) n_new = M n_old.
class StepOperator {
public:
    StepOperator(const OperatorMatrices& mats, const ModelParams& params, double dt, double q);

    /// Advances the field; rho is advanced with the time-trapezoid of the
    /// selection mass.  Returns (n_new, rho_new).
    std::pair<Field, double> advance(const Field& state, double rho) const;

    double dt() const { return dt_; }
    double q() const { return q_; }
    /// True when the system matrix is an M-matrix, which guarantees nodal
    /// positivity for nonnegative data at this dt.
    bool positivity_guaranteed() const { return m_matrix_; }

private:
    const OperatorMatrices* mats_;
    TriFactor factor_;
    double dt_;
    double q_;
    bool m_matrix_;
};

/// One implicit-Euler step with Q evaluated at the step's start.
std::pair<Field, double> step(const Field& state, double rho, const ModelParams& params,
                              const OperatorMatrices& mats, double dt);

struct FemConfig {
    Grid grid;
    double dt = 1e-3;
    double t_max = 10.0;
    std::vector<double> snapshot_times;
    bool stop_at_threshold = false;
};

struct SimulationRecord {
    std::vector<double> times;
    std::vector<double> rho_series;
    std::vector<double> mass_series;       // n_bar(t) = integral n dx
    std::vector<double> selection_series;  // integral s n dx at each time
    std::vector<double> l2_series;         // ||n(t)||_L2
    std::vector<int> q_regime_series;      // regime used to advance from each sample
    std::optional<double> threshold_time;  // first time rho = rho0, interpolated
    std::optional<int> crossing_index;     // index of the inserted crossing sample
    std::vector<std::pair<double, Field>> snapshots;
    Field final_state;
    double min_nodal_value = 0.0;  // over all steps and nodes
    bool positivity_guaranteed = true;

    bool rho_nondecreasing() const;
};

struct NumericalFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ThresholdUnreachable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Advances from the initial data, switching the division rate from q0 to q1
/// at the interpolated crossing of rho0 (the crossing sample is inserted into
/// the series).  Throws NumericalFailure on NaN, reporting the step index.
SimulationRecord run(const InitialData& initial, const ModelParams& params, const FemConfig& config);

/// Max-over-steps defect of the balance identity
///   Delta(n_bar + rho) = dt (Q - d) * trapezoid(n_bar)
/// on the recorded series; a time-quadrature diagnostic, O(dt^2) per step.
double discrete_balance_residual(const SimulationRecord& record, const ModelParams& params);

/// Max-over-steps defect of the conservation law the discrete scheme satisfies
/// exactly: Delta n_bar + dt*wm_new - dt (Q - d) n_bar_new = 0 with
/// wm = selection mass.  Nonzero values indicate assembly or solver faults,
/// so this stays at roundoff level regardless of dt.
double discrete_balance_residual_exact(const SimulationRecord& record, const ModelParams& params);

/// Convenience wrapper: runs with stop_at_threshold, doubling t_max until the
/// crossing is found.  Throws ThresholdUnreachable when t_cap is exceeded.
double time_to_threshold_numeric(const InitialData& initial, const ModelParams& params,
                                 const Grid& grid, double dt, double t_cap = 1e4);

} // namespace gcs::fem
