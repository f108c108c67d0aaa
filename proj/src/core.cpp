#include "gcs/core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gcs {

void ModelParams::validate() const {
    if (!(mu > 0.0)) throw std::invalid_argument("ModelParams: mu must be > 0");
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("ModelParams: eps must be in (0,1]");
    if (!(rho0 > 0.0)) throw std::invalid_argument("ModelParams: rho0 must be > 0");
    if (!(d >= 0.0)) throw std::invalid_argument("ModelParams: d must be >= 0");
    if (!(s0 >= 0.0)) throw std::invalid_argument("ModelParams: s0 must be >= 0");
}

SelectionProfile SelectionProfile::indicator(double eps, double s0) {
    if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("indicator: eps must be in (0,1]");
    if (s0 < 0.0) throw std::invalid_argument("indicator: s0 must be >= 0");
    if (eps >= 1.0) return piecewise({0.0, 1.0}, {s0});
    return piecewise({0.0, eps, 1.0}, {s0, 0.0});
}

SelectionProfile SelectionProfile::piecewise(std::vector<double> edges, std::vector<double> values) {
    if (edges.size() < 2 || values.size() + 1 != edges.size())
        throw std::invalid_argument("SelectionProfile: need m+1 edges for m values");
    if (edges.front() != 0.0 || edges.back() != 1.0)
        throw std::invalid_argument("SelectionProfile: edges must span [0,1]");
    if (!std::is_sorted(edges.begin(), edges.end()))
        throw std::invalid_argument("SelectionProfile: edges must be sorted");
    for (double v : values)
        if (v < 0.0) throw std::invalid_argument("SelectionProfile: values must be >= 0");
    SelectionProfile s;
    s.edges_ = std::move(edges);
    s.values_ = std::move(values);
    return s;
}

double SelectionProfile::value(double x) const {
    if (x < edges_.front() || x > edges_.back()) return 0.0;
    // last interval is closed on the right
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    std::size_t j = static_cast<std::size_t>(it - edges_.begin());
    if (j == 0) j = 1;
    if (j > values_.size()) j = values_.size();
    return values_[j - 1];
}

double SelectionProfile::integral(double a, double b) const {
    a = std::max(a, 0.0);
    b = std::min(b, 1.0);
    if (b <= a) return 0.0;
    double acc = 0.0;
    for (std::size_t j = 0; j < values_.size(); ++j) {
        double lo = std::max(a, edges_[j]);
        double hi = std::min(b, edges_[j + 1]);
        if (hi > lo) acc += values_[j] * (hi - lo);
    }
    return acc;
}

double SelectionProfile::max_value() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, v);
    return m;
}

Grid::Grid(int cells) : n_cells(cells), h(1.0 / cells) {
    if (cells < 1) throw std::invalid_argument("Grid: n_cells must be >= 1");
}

Grid::Grid(int cells, double eps) : Grid(cells) {
    if (!resolves(eps))
        throw std::invalid_argument("Grid: selection window eps=" + std::to_string(eps) +
                                    " not resolved by " + std::to_string(cells) +
                                    " cells (need >= 4 cells inside the window)");
}

Field::Field(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (static_cast<int>(values.size()) != g.n_nodes())
        throw std::invalid_argument("Field: value count does not match grid nodes");
}

Field::Field(const Grid& g, double constant) : grid(g), values(g.n_nodes(), constant) {}

Field Field::sample(const Grid& g, const std::function<double(double)>& f) {
    std::vector<double> v(g.n_nodes());
    for (int i = 0; i < g.n_nodes(); ++i) v[i] = f(g.node(i));
    return Field(g, std::move(v));
}

bool Field::has_nan() const {
    for (double v : values)
        if (std::isnan(v)) return true;
    return false;
}

static void require_same_grid(const Field& f, const Field& g) {
    if (!(f.grid == g.grid)) throw std::invalid_argument("fields live on different grids");
}

double inner_product(const Field& f, const Field& g) {
    require_same_grid(f, g);
    const int n = f.grid.n_cells;
    double acc = 0.5 * (f[0] * g[0] + f[n] * g[n]);
    for (int i = 1; i < n; ++i) acc += f[i] * g[i];
    return acc * f.grid.h;
}

double l2_norm(const Field& f) { return std::sqrt(inner_product(f, f)); }

double mass(const Field& f) {
    const int n = f.grid.n_cells;
    double acc = 0.5 * (f[0] + f[n]);
    for (int i = 1; i < n; ++i) acc += f[i];
    return acc * f.grid.h;
}

double integrate_field(const Field& f, double a, double b) {
    const Grid& g = f.grid;
    a = std::max(a, 0.0);
    b = std::min(b, 1.0);
    if (b <= a) return 0.0;
    // P1 interpolant within cell i: f(x) = f_i + (f_{i+1}-f_i)(x-x_i)/h
    auto value_at = [&](int cell, double x) {
        double t = (x - g.node(cell)) / g.h;
        return f[cell] * (1.0 - t) + f[cell + 1] * t;
    };
    int c0 = std::min(static_cast<int>(a / g.h), g.n_cells - 1);
    int c1 = std::min(static_cast<int>(b / g.h), g.n_cells - 1);
    if (b >= 1.0) c1 = g.n_cells - 1;
    double acc = 0.0;
    for (int c = c0; c <= c1; ++c) {
        double lo = std::max(a, g.node(c));
        double hi = std::min(b, g.node(c + 1));
        if (hi > lo) acc += (hi - lo) * 0.5 * (value_at(c, lo) + value_at(c, hi));
    }
    return acc;
}

double weighted_mass(const SelectionProfile& s, const Field& f) {
    double acc = 0.0;
    const auto& e = s.edges();
    const auto& v = s.values();
    for (std::size_t j = 0; j < v.size(); ++j)
        if (v[j] != 0.0) acc += v[j] * integrate_field(f, e[j], e[j + 1]);
    return acc;
}

// splitmix64; portable across standard libraries, unlike <random> distributions
static double unit_uniform(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z = z ^ (z >> 31);
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

Field realize_initial(const InitialData& data, const Grid& grid) {
    struct Visitor {
        const Grid& grid;
        Field operator()(const SamplesInit& s) const {
            if (!(s.field.grid == grid))
                throw std::invalid_argument("realize_initial: sample grid mismatch");
            if (s.field.has_nan()) throw std::invalid_argument("realize_initial: NaN in samples");
            return s.field;
        }
        Field operator()(const ConstantInit& c) const {
            if (c.value < 0.0) throw std::invalid_argument("realize_initial: constant must be >= 0");
            return Field(grid, c.value);
        }
        Field operator()(const RandomInit& r) const {
            if (!(r.lower >= 0.0 && r.lower < r.upper))
                throw std::invalid_argument("realize_initial: need 0 <= lower < upper");
            std::uint64_t state = r.seed;
            std::vector<double> v(grid.n_nodes());
            for (double& x : v) x = r.lower + (r.upper - r.lower) * unit_uniform(state);
            return Field(grid, std::move(v));
        }
        Field operator()(const DiracInit& d) const {
            if (!(d.z > 0.0 && d.z < 1.0))
                throw std::invalid_argument("realize_initial: Dirac support must be inside (0,1)");
            if (grid.n_cells < 2)
                throw std::invalid_argument("realize_initial: Dirac needs an interior node");
            // nearest interior node, height 1/h: unit trapezoidal mass on every grid
            int idx = static_cast<int>(std::lround(d.z * grid.n_cells));
            idx = std::clamp(idx, 1, grid.n_cells - 1);
            std::vector<double> v(grid.n_nodes(), 0.0);
            v[idx] = 1.0 / grid.h;
            return Field(grid, std::move(v));
        }
    };
    return std::visit(Visitor{grid}, data);
}

} // namespace gcs
