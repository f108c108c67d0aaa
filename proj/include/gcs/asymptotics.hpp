#pragma once

#include <string>

#include "gcs/core.hpp"

// Closed-form time-to-threshold estimates in the three asymptotic regimes:
// narrow selection window, small mutation rate, large mutation rate.  Each
// estimate carries a validity record; callers decide whether to trust it.

namespace gcs::asym {

enum class Regime { NarrowEps, SmallMu, LargeMu };

struct ThresholdEstimate {
    double t_est = 0.0;
    Regime regime = Regime::NarrowEps;
    bool in_regime = true;      // false when a stated hypothesis is violated
    std::string validity;       // hypotheses and the asserted error order
    std::string error_order;    // order in the regime's small parameter
};

/// Narrow-window estimate t = (1/b) ln(1 + rho0 b / (eps s0 nbar0)); requires
/// b > 0, flags mu <= b/pi^2 (higher modes still growing) in the validity.
ThresholdEstimate t_threshold_narrow_eps(const ModelParams& params, double n_initial_mass);

/// Leading-log variant t = (1/b) ln(rho0 b / (eps sbar <n_I,1>)) of the same
/// estimate (no "1+"); agrees with the primary form to leading order.
double t_threshold_narrow_eps_leading(const ModelParams& params, double n_initial_mass);

/// Small-mutation-rate estimate t = (1/(b-s0)) ln(1 + (b-s0) rho0 / int s n_I),
/// with the limit t = rho0 / int s n_I when b == s0.  Throws when the overlap
/// vanishes (founder outside the window: use the Green-function bounds).
ThresholdEstimate t_threshold_small_mu(const ModelParams& params, double s_n_initial_overlap);

/// Large-mutation-rate estimate
/// t = (1/(b-M00)) ln(1 + rho0 (b-M00) / (int s * nbar0)); requires b > M00.
ThresholdEstimate t_threshold_large_mu(const ModelParams& params, double n_initial_mass,
                                       double m00);

} // namespace gcs::asym
