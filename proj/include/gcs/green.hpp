#pragma once

#include <optional>
#include <string>
#include <utility>

#include "gcs/core.hpp"

// Analytic heat kernels and two-sided time-to-threshold bounds for a
// monoclonal founder (Dirac data at trait z outside the selection window),
// on the whole line and on [0,1] with reflecting ends.  The exact kernel of
// the selection problem has no closed form; everything here rests on the
// comparison principle: the growth-rate-b and growth-rate-(b - s_inf) heat
// kernels sandwich it.

namespace gcs::green {

struct DiracSetup {
    double z = 0.5;
    ModelParams params;
    DomainSpec domain;
    double s_inf = 1.0;  // ||s||_inf, = s0 for the canonical window

    /// Requires z > eps (founder outside the window).  On the whole line the
    /// window is [-eps, eps] and everything is even in z, so a founder left
    /// of the window is handled by reflecting z -> -z before the call.
    DiracSetup(double founder_z, const ModelParams& p, DomainSpec dom);
};

struct BoundPair {
    double t_l = 0.0;
    std::optional<double> t_u;      // main route (integral Taylor / erfc branch)
    std::optional<double> t_u_inf;  // whole-line-kernel route (bounded domain only)
    std::string branch;

    /// Sharpest available upper bound.
    std::optional<double> t_upper() const;
};

/// Free-space kernel exp(bt - (x-z)^2/(4 mu t)) / sqrt(4 pi mu t).
double kernel_free(double t, double x, double z, double mu, double b);

/// Neumann kernel on [0,1] by the method of images.  n_images <= 0 selects
/// error-controlled truncation (dropped tail below 1e-14 of the sum).
double kernel_bounded(double t, double x, double z, double mu, double b, int n_images = 0);

struct QuadConfig {
    int points = 16;  // Gauss-Legendre points per panel
    int panels = 24;  // panels in the sqrt(t) variable
};

/// Two-sided enclosure of the selected output rho(t) for Dirac data:
/// (lower, upper) from the comparison kernels with rates b - s_inf and b.
std::pair<double, double> rho_dirac(const DiracSetup& setup, double t, const QuadConfig& quad = {});

/// Lower bound (1/2e) exp(-2/t) for J_a(t) = int_0^t exp(a u - 1/u) du/sqrt(u),
/// valid for a >= 0; the bound itself does not depend on a.
double j_lower_bound(double a, double t);

/// Whole-line two-sided bounds on the time to threshold.
BoundPair bounds_free(const DiracSetup& setup, double rho0);

/// Bounded-domain two-sided bounds; t_u_inf is the alternate upper bound from
/// minorizing the Neumann kernel by the whole-line one (sharper at small mu).
BoundPair bounds_bounded(const DiracSetup& setup, double rho0);

/// Pointwise upper bound on the Neumann kernel for x in the window, z outside:
/// exp(bt - (z-eps)^2/(4 mu t)) (4/sqrt(4 pi mu t) + 2/sqrt(2(1-eps))).
double kernel_bound_upper(double t, double x, double z, const DiracSetup& setup);

/// Pointwise lower bound on the Neumann kernel:
/// exp(bt - (x+z)^2/(4 mu t)) (1/sqrt(4 pi mu t) + erfc(sqrt(3/(mu t)))/(4 sqrt 3)).
double kernel_bound_lower(double t, double x, double z, double mu, double b);

} // namespace gcs::green
