#pragma once

#include <stdexcept>
#include <vector>

#include "gcs/core.hpp"

// Spectral calculus for A = -mu d^2/dx^2 + s(x) on (0,1) with Neumann ends,
// s the canonical selection window.  Exact eigenpairs come from the roots of
// the transfer-matrix determinant; asymptotic eigenpairs from the two-scale
// expansion in the window width.  On top of both sit the modal solution, the
// selected-output series rho(t), its threshold-time inversion, and the modal
// cascade used in the large-mutation-rate regime.

namespace gcs::spectral {

struct EigenPair {
    int k = 0;          // mode index = number of interior zeros
    double lambda = 0;  // eigenvalue
    Field vector;       // L2-normalized on its grid, vector(0) > 0
};

struct AsymptoticEigen {
    int k = 0;
    double lambda0 = 0;  // mu (k pi)^2
    double lambda1 = 0;  // sbar v0k(0)^2 / ||v0k||^2, independent of mu
    double lambda_first_order = 0;  // lambda0 + eps*lambda1
    Field v0;
    Field v1;  // first corrector, orthogonal to v0
};

struct ModalCoefficients {
    std::vector<double> lambda;     // retained eigenvalues
    std::vector<double> alpha0;     // <n_I, V_k>
    std::vector<double> s_overlap;  // <V_k, s>
    std::vector<double> phi;        // alpha0*s_overlap/(b - lambda); NaN when degenerate
    double b = 0.0;
    double n_initial_l2 = 0.0;

    int modes() const { return static_cast<int>(lambda.size()); }
};

struct ModalSolution {
    Field field;
    double remainder_bound = 0.0;  // ||n_I|| * exp((b - lambda_K) t)
};

struct RootCountError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnreachableThreshold : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Pole-free determinant whose zeros are exactly the eigenvalues:
///   G(L) = w0 sin(w0 e) cos(w1 (1-e)) + w1 cos(w0 e) sin(w1 (1-e)),
/// with w0^2 = (L - s0)/mu, w1^2 = L/mu, evaluated through even power series
/// in w^2 so the hyperbolic branch L < s0 needs no complex arithmetic.
double characteristic_value(double lambda, const ModelParams& params);

/// First K eigenpairs: scan-and-bisect on characteristic_value, eigenvectors
/// from the transfer-matrix formula sampled on the grid.  Verifies the k-zero
/// count, rescanning with a halved step on mismatch.  Covers the canonical
/// two-piece window; profiles with more pieces would compose one transfer
/// matrix per piece in characteristic_value and eigenvector_value.
std::vector<EigenPair> eigs_exact(const ModelParams& params, int K, const Grid& grid);

/// Two-scale asymptotic eigenpairs for a narrow window.
std::vector<AsymptoticEigen> eigs_asymptotic(const ModelParams& params, int K, const Grid& grid);

/// Second-order boundary-layer corrector pi2(y) for the fast-variable profile
/// s_fast on [0,1]: pi2(y) = (1/mu) int_0^y int_0^z s, with pi2(0) = 0.
double corrector_pi2(double y, const SelectionProfile& s_fast, double mu);
double corrector_pi2_deriv(double y, const SelectionProfile& s_fast, double mu);

ModalCoefficients modal_coefficients(const Field& n_initial, const SelectionProfile& s,
                                     const std::vector<EigenPair>& pairs, double b);

/// Truncated modal sum n(t,x) = sum alpha_k exp((b-lambda_k)t) V_k(x).
ModalSolution modal_solution(const ModalCoefficients& coeffs, const std::vector<EigenPair>& pairs,
                             double t);

/// rho(t) = sum phi_k (exp((b-lambda_k)t) - 1); modes with |b-lambda_k| below
/// 1e-10 use the limit term alpha_k s_k t.
double rho_spectral(const ModalCoefficients& coeffs, double t);

/// Inverts rho(t) = rho0 by bracketed bisection plus Newton polish to
/// |rho - rho0| <= 1e-12 rho0.  Throws UnreachableThreshold when the
/// analytic limit rho(inf) is below rho0.
double time_to_threshold_spectral(const ModalCoefficients& coeffs, double rho0);

/// Overlap matrix of the homogeneous Neumann cosines against s:
/// M[i][k] = <s v_i, v_k>, exact piecewise cosine integrals.
std::vector<std::vector<double>> overlap_matrix(const SelectionProfile& s, int K);

/// Modal cascade in the diffusion time scale: Gamma_0k = nI_k exp(-(k pi)^2 t),
///   dGamma_j/dt + diag((k pi)^2) Gamma_j = (b - M) Gamma_{j-1},  Gamma_j(0)=0.
/// Integrated by the exact exponential rule for piecewise-linear forcing on
/// t_grid.  Result: gamma[j][k][ti].
std::vector<std::vector<std::vector<double>>> modal_cascade(
    const std::vector<double>& n_initial_modes, const std::vector<std::vector<double>>& M,
    double b, int J, const std::vector<double>& t_grid);

} // namespace gcs::spectral
