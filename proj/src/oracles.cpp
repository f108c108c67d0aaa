#include "gcs/oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gcs/fem.hpp"

namespace gcs::oracles {

namespace {

struct Pencil {
    std::vector<double> a_diag, a_off;  // A = K + S
    std::vector<double> m_diag, m_off;  // M

    // Negative-pivot count of the LDL^T factorization of A - sigma M.
    // Extended precision: the recursion's absolute accuracy scales with
    // ||A|| ~ mu/h^2, which at 2e4 cells would swamp the smallest
    // eigenvalues in double.
    int count_below(double sigma) const {
        const int n = static_cast<int>(a_diag.size());
        int count = 0;
        long double d_prev = 0.0L;
        for (int i = 0; i < n; ++i) {
            long double d = static_cast<long double>(a_diag[i]) - static_cast<long double>(sigma) * m_diag[i];
            if (i > 0) {
                long double e = static_cast<long double>(a_off[i - 1]) -
                                static_cast<long double>(sigma) * m_off[i - 1];
                d -= e * e / d_prev;
            }
            if (d == 0.0L) d = -1e-300L;  // sigma is numerically an eigenvalue
            if (d < 0.0L) ++count;
            d_prev = d;
        }
        return count;
    }
};

Pencil build(const ModelParams& params, const SelectionProfile& s, int n_cells) {
    Grid grid(n_cells);
    fem::OperatorMatrices mats = fem::assemble(grid, params, s);
    Pencil p;
    p.a_diag = mats.stiffness.diag;
    p.a_off = mats.stiffness.off;
    for (std::size_t i = 0; i < p.a_diag.size(); ++i) p.a_diag[i] += mats.selection.diag[i];
    for (std::size_t i = 0; i < p.a_off.size(); ++i) p.a_off[i] += mats.selection.off[i];
    p.m_diag = mats.mass.diag;
    p.m_off = mats.mass.off;
    return p;
}

} // namespace

int fem_pencil_count_below(const ModelParams& params, const SelectionProfile& s, int n_cells,
                           double sigma) {
    return build(params, s, n_cells).count_below(sigma);
}

std::vector<double> fem_pencil_eigenvalues(const ModelParams& params, const SelectionProfile& s,
                                           int n_cells, int K) {
    if (K < 1) throw std::invalid_argument("fem_pencil_eigenvalues: K must be >= 1");
    Pencil p = build(params, s, n_cells);

    const double pi = std::numbers::pi;
    double hi = params.s0 + params.mu * pi * pi * double(K + 1) * double(K + 1) + 1.0;
    while (p.count_below(hi) < K) hi *= 2.0;

    std::vector<double> eigs(K);
    for (int j = 0; j < K; ++j) {
        double lo = -1.0, up = hi;
        // invariant: count(lo) <= j < count(up)
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + up);
            if (up - lo <= 1e-13 * std::max(1.0, std::abs(mid)) + 1e-300) break;
            if (p.count_below(mid) <= j) {
                lo = mid;
            } else {
                up = mid;
            }
        }
        eigs[j] = 0.5 * (lo + up);
    }
    return eigs;
}

} // namespace gcs::oracles
