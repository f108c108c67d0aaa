#include "gcs/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "gcs/numerics.hpp"

namespace gcs::asym {

ThresholdEstimate t_threshold_narrow_eps(const ModelParams& params, double n_initial_mass) {
    params.validate();
    const double b = params.b();
    if (!(b > 0.0))
        throw std::invalid_argument("t_threshold_narrow_eps: needs b = q0 - d > 0");
    if (!(n_initial_mass > 0.0))
        throw std::invalid_argument("t_threshold_narrow_eps: needs positive initial mass");
    ThresholdEstimate est;
    est.regime = Regime::NarrowEps;
    est.error_order = "sqrt(eps)*|log eps|";
    const double mode_gap = b / (std::numbers::pi * std::numbers::pi);
    est.in_regime = params.mu > mode_gap;
    est.validity = est.in_regime
                       ? "mu > b/pi^2 holds; only the flat mode grows"
                       : "mu <= b/pi^2: higher modes still grow, estimate out of regime";
    est.t_est = (1.0 / b) * std::log1p(params.rho0 * b / (params.eps * params.s0 * n_initial_mass));
    return est;
}

double t_threshold_narrow_eps_leading(const ModelParams& params, double n_initial_mass) {
    params.validate();
    const double b = params.b();
    if (!(b > 0.0) || !(n_initial_mass > 0.0))
        throw std::invalid_argument("t_threshold_narrow_eps_leading: needs b > 0 and mass > 0");
    return (1.0 / b) * std::log(params.rho0 * b / (params.eps * params.s0 * n_initial_mass));
}

ThresholdEstimate t_threshold_small_mu(const ModelParams& params, double s_n_initial_overlap) {
    params.validate();
    if (!(s_n_initial_overlap > 0.0))
        throw std::invalid_argument(
            "t_threshold_small_mu: int s n_I vanishes; the leading order never crosses "
            "(use the Dirac kernel bounds instead)");
    ThresholdEstimate est;
    est.regime = Regime::SmallMu;
    est.error_order = "O(mu)";
    est.in_regime = params.mu <= 0.1;
    est.validity = est.in_regime ? "zero-diffusion leading order; error O(mu)"
                                 : "mu > 0.1: zero-diffusion limit not yet reached";
    const double rate = params.b() - params.s0;
    // rate -> 0 limit of (1/rate) log1p(rate rho0 / overlap) is rho0/overlap
    const double x = params.rho0 / s_n_initial_overlap;
    est.t_est = std::abs(rate) < 1e-14 ? x : std::log1p(rate * x) / rate;
    if (!(est.t_est > 0.0) || std::isnan(est.t_est)) {
        // b < s0 and the log argument fell below 0: selection outruns growth
        throw std::invalid_argument("t_threshold_small_mu: threshold unreachable at leading order");
    }
    return est;
}

ThresholdEstimate t_threshold_large_mu(const ModelParams& params, double n_initial_mass,
                                       double m00) {
    params.validate();
    const double rate = params.b() - m00;
    if (!(rate > 0.0))
        throw std::invalid_argument("t_threshold_large_mu: needs b > M00");
    if (!(n_initial_mass > 0.0))
        throw std::invalid_argument("t_threshold_large_mu: needs positive initial mass");
    ThresholdEstimate est;
    est.regime = Regime::LargeMu;
    est.error_order = "O(1/mu)";
    est.in_regime = params.mu >= 1.0;
    est.validity = est.in_regime ? "mu >= O(1); flat-mode cascade applies"
                                 : "mu < O(1): cascade truncation not yet accurate";
    const double s_int = params.eps * params.s0;  // int_0^1 s for the canonical window
    est.t_est = std::log1p(params.rho0 * rate / (s_int * n_initial_mass)) / rate;
    return est;
}

} // namespace gcs::asym
