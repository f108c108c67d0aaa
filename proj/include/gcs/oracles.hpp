#pragma once

#include <vector>

#include "gcs/core.hpp"

// Brute-force reference solvers used only to cross-check the analytic
// routes; deliberately independent of the transcendental eigensolver.

namespace gcs::oracles {

/// Lowest K eigenvalues of the P1 discretization of -mu d^2/dx^2 + s(x) with
/// Neumann ends: generalized pencil (K + S) v = lambda M v on n_cells cells,
/// solved by Sturm-sequence (inertia) bisection on the tridiagonal pencil.
std::vector<double> fem_pencil_eigenvalues(const ModelParams& params, const SelectionProfile& s,
                                           int n_cells, int K);

/// Number of pencil eigenvalues strictly below sigma.
int fem_pencil_count_below(const ModelParams& params, const SelectionProfile& s, int n_cells,
                           double sigma);

} // namespace gcs::oracles
