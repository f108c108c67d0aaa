#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

// Shared domain types for the division-mutation-selection model on the unit
// trait interval: model parameters, piecewise-constant selection profiles,
// uniform grids, nodal fields and the quadratures built on them.

namespace gcs {

enum class DomainKind {
    BoundedUnit,    // trait interval [0,1], Neumann ends; fem + spectral
    HalfLineWhole,  // whole real line; only the Green-function bounds use it
};

struct DomainSpec {
    DomainKind kind = DomainKind::BoundedUnit;
    bool bounded() const { return kind == DomainKind::BoundedUnit; }
};

/// Scalar model coefficients.  b = Q0 - d is derived, never stored.
struct ModelParams {
    double q0 = 2.0;    // division rate while the selected output is below rho0
    double q1 = 0.0;    // division rate after the threshold is crossed
    double d = 0.0;     // death rate, >= 0
    double mu = 1.0;    // mutation (diffusion) rate in trait space, > 0
    double eps = 0.1;   // selection half-width, in (0,1]
    double rho0 = 1.0;  // selected-output threshold, > 0
    double s0 = 1.0;    // selection amplitude inside the window

    double b() const { return q0 - d; }
    /// Division rate as a function of the selected output.
    double q_of_rho(double rho) const { return rho <= rho0 ? q0 : q1; }
    /// Throws std::invalid_argument when a constraint is violated.
    void validate() const;
};

/// Piecewise-constant selection function on [0,1]: edges[0]=0 < ... < edges[m]=1,
/// values[j] >= 0 on [edges[j], edges[j+1]).
class SelectionProfile {
public:
    /// Canonical window: s = s0 on [0,eps], 0 on (eps,1].
    static SelectionProfile indicator(double eps, double s0 = 1.0);
    static SelectionProfile piecewise(std::vector<double> edges, std::vector<double> values);

    double value(double x) const;
    /// Exact integral of s over [a,b] (clipped to [0,1]).
    double integral(double a, double b) const;
    double sbar() const { return integral(0.0, 1.0); }
    double max_value() const;

    const std::vector<double>& edges() const { return edges_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> edges_;
    std::vector<double> values_;
};

/// Uniform grid on [0,1] with n_cells cells, n_cells+1 nodes.
struct Grid {
    int n_cells = 0;
    double h = 0.0;

    Grid() = default;
    explicit Grid(int cells);
    /// Constructor that also checks the selection window is resolved
    /// (at least 4 cells inside [0,eps]); throws otherwise.
    Grid(int cells, double eps);

    int n_nodes() const { return n_cells + 1; }
    double node(int i) const { return static_cast<double>(i) / n_cells; }
    bool resolves(double eps) const { return eps * n_cells >= 4.0 - 1e-12; }
    bool operator==(const Grid& o) const { return n_cells == o.n_cells; }
};

/// A trait-space function as nodal samples on a grid.
struct Field {
    Grid grid;
    std::vector<double> values;

    Field() = default;
    Field(const Grid& g, std::vector<double> v);
    Field(const Grid& g, double constant);
    static Field sample(const Grid& g, const std::function<double(double)>& f);

    double operator[](int i) const { return values[i]; }
    double& operator[](int i) { return values[i]; }
    int size() const { return static_cast<int>(values.size()); }
    bool has_nan() const;
};

struct SamplesInit { Field field; };
struct ConstantInit { double value = 1.0; };
struct RandomInit { std::uint64_t seed = 0; double lower = 0.0; double upper = 1.0; };
struct DiracInit { double z = 0.5; };

/// Initial population: samples, a constant, i.i.d. uniform nodal noise, or a
/// monoclonal founder at trait z realized as a unit-mass nodal spike.
using InitialData = std::variant<SamplesInit, ConstantInit, RandomInit, DiracInit>;

/// Composite trapezoidal approximation of the L2 inner product on [0,1].
double inner_product(const Field& f, const Field& g);
double l2_norm(const Field& f);
/// Trapezoidal integral of f over [0,1].
double mass(const Field& f);

/// Integral of s(x) f(x) over [0,1] where f is the P1 interpolant of the nodal
/// values.  Cells are split at profile breakpoints, so the result is exact for
/// piecewise-linear f; no O(h) bias from the window edge.
double weighted_mass(const SelectionProfile& s, const Field& f);

/// Exact integral of the P1 interpolant of f over [a,b].
double integrate_field(const Field& f, double a, double b);

Field realize_initial(const InitialData& data, const Grid& grid);

} // namespace gcs
