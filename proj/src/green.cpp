#include "gcs/green.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "gcs/numerics.hpp"

namespace gcs::green {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive_time(double t, const char* who) {
    if (!(t > 0.0)) throw std::invalid_argument(std::string(who) + ": t must be > 0");
}

// Gaussian mass of the window [lo,hi] for a unit heat kernel centered at a.
double gaussian_window_mass(double lo, double hi, double a, double mu, double t) {
    const double c = 1.0 / (2.0 * std::sqrt(mu * t));
    return 0.5 * (std::erf((hi - a) * c) - std::erf((lo - a) * c));
}

// Window mass of the image-sum Neumann kernel, growth factor excluded.
double window_mass_bounded(double lo, double hi, double z, double mu, double t) {
    double acc = gaussian_window_mass(lo, hi, z, mu, t) + gaussian_window_mass(lo, hi, -z, mu, t);
    for (int n = 1; n < 1000000; ++n) {
        double pair = gaussian_window_mass(lo, hi, 2.0 * n - z, mu, t) +
                      gaussian_window_mass(lo, hi, 2.0 * n + z, mu, t) +
                      gaussian_window_mass(lo, hi, -2.0 * n - z, mu, t) +
                      gaussian_window_mass(lo, hi, -2.0 * n + z, mu, t);
        acc += pair;
        if (n >= 2 && std::abs(pair) <= 1e-16 * std::abs(acc)) break;
    }
    return acc;
}

// rho(t) for one comparison kernel: s0 * int_0^t exp(rate tau) W(tau) dtau,
// integrated in u = sqrt(tau) to remove the square-root structure at 0.
double rho_one_kernel(const DiracSetup& setup, double t, double rate, const QuadConfig& quad) {
    if (t == 0.0) return 0.0;
    const double mu = setup.params.mu;
    const double eps = setup.params.eps;
    const bool bounded = setup.domain.bounded();
    GaussLegendre gl(quad.points);
    auto integrand = [&](double u) {
        double tau = u * u;
        if (tau <= 0.0) return 0.0;
        double w = bounded ? window_mass_bounded(0.0, eps, setup.z, mu, tau)
                           : gaussian_window_mass(-eps, eps, setup.z, mu, tau);
        return 2.0 * u * std::exp(rate * tau) * w;
    };
    return setup.params.s0 * gl.integrate(integrand, 0.0, std::sqrt(t), quad.panels);
}

} // namespace

DiracSetup::DiracSetup(double founder_z, const ModelParams& p, DomainSpec dom)
    : z(founder_z), params(p), domain(dom), s_inf(p.s0) {
    p.validate();
    if (!(z > p.eps))
        throw std::invalid_argument("DiracSetup: founder trait must lie outside the window, z > eps");
    if (dom.bounded() && !(z < 1.0))
        throw std::invalid_argument("DiracSetup: founder trait must lie inside (eps, 1)");
}

std::optional<double> BoundPair::t_upper() const {
    if (t_u && t_u_inf) return std::min(*t_u, *t_u_inf);
    return t_u ? t_u : t_u_inf;
}

double kernel_free(double t, double x, double z, double mu, double b) {
    require_positive_time(t, "kernel_free");
    double d = x - z;
    return std::exp(b * t - d * d / (4.0 * mu * t)) / std::sqrt(4.0 * kPi * mu * t);
}

double kernel_bounded(double t, double x, double z, double mu, double b, int n_images) {
    require_positive_time(t, "kernel_bounded");
    const double inv = 1.0 / (4.0 * mu * t);
    auto g = [&](double off) { return std::exp(-off * off * inv); };
    double acc = g(x - z) + g(x + z);
    if (n_images > 0) {
        for (int n = 1; n <= n_images; ++n)
            acc += g(x - 2.0 * n + z) + g(x - 2.0 * n - z) + g(x + 2.0 * n + z) +
                   g(x + 2.0 * n - z);
    } else {
        for (int n = 1; n < 1000000; ++n) {
            double pair = g(x - 2.0 * n + z) + g(x - 2.0 * n - z) + g(x + 2.0 * n + z) +
                          g(x + 2.0 * n - z);
            acc += pair;
            // images recede by 2 per step; once past |x|+|z| the terms fall
            // super-geometrically, so the dropped tail is below the last pair
            if (n >= 2 && pair <= 1e-16 * acc) break;
        }
    }
    return std::exp(b * t) * acc / std::sqrt(4.0 * kPi * mu * t);
}

std::pair<double, double> rho_dirac(const DiracSetup& setup, double t, const QuadConfig& quad) {
    if (t < 0.0) throw std::invalid_argument("rho_dirac: t must be >= 0");
    if (t == 0.0) return {0.0, 0.0};
    const double b = setup.params.b();
    return {rho_one_kernel(setup, t, b - setup.s_inf, quad), rho_one_kernel(setup, t, b, quad)};
}

double j_lower_bound(double /*a*/, double t) {
    if (t < 0.0) throw std::invalid_argument("j_lower_bound: t must be >= 0");
    if (t == 0.0) return 0.0;
    return 0.5 * std::exp(-1.0) * std::exp(-2.0 / t);
}

namespace {

// Smallest Taylor-order inversion of the lower bound
//   rho >= pref * (a^k/k!) * (t^{k+1/2} - t0^{k+1/2})/(k+1/2)
// over k in {0,...,8}; every k gives a valid upper bound, the min is sharpest.
double invert_taylor_bound(double pref, double a, double t0, double rho_gap) {
    double best = kInf;
    double factorial = 1.0;
    double a_pow = 1.0;
    for (int k = 0; k <= 8; ++k) {
        if (k > 0) {
            factorial *= k;
            a_pow *= a;
            if (a_pow == 0.0) break;
        }
        double p = k + 0.5;
        double tk = (p * factorial / (pref * a_pow)) * rho_gap + std::pow(t0, p);
        best = std::min(best, std::pow(tk, 1.0 / p));
    }
    return best;
}

} // namespace

BoundPair bounds_free(const DiracSetup& setup, double rho0) {
    if (!(rho0 > 0.0)) throw std::invalid_argument("bounds_free: rho0 must be > 0");
    const double b = setup.params.b();
    const double mu = setup.params.mu;
    const double eps = setup.params.eps;
    const double z = setup.z;
    const double s_inf = setup.s_inf;

    BoundPair out;
    // lower bound from the rate-b kernel evaluated at the near window edge
    const double omega = std::sqrt(kPi * mu) * rho0 / (2.0 * eps);
    const double lw = std::log(omega);
    out.t_l = (lw + std::sqrt(lw * lw + (z - eps) * (z - eps) * (b + 1.0) / mu)) / (2.0 * (b + 1.0));

    // upper bounds from the rate-(b - s_inf) kernel at the far window edge
    const double t0 = (z + eps) / (2.0 * std::sqrt((b + s_inf) * mu));
    const double j1_pref = eps * (z + eps) / (4.0 * std::exp(1.0) * mu * std::sqrt(kPi));
    const double c0 = (z + eps) * std::sqrt(b + s_inf) / (2.0 * std::sqrt(mu));
    const double j1_t0 = j1_pref * std::exp(-2.0 * c0);  // (z+eps)^2/(2 mu t0) = 2 c0
    if (rho0 < j1_t0) {
        out.t_u = (z + eps) * (z + eps) / (2.0 * mu * std::log(j1_pref / rho0));
        out.branch = "short-time";
    } else if (b >= s_inf) {
        double pref = eps * std::exp(-c0) / std::sqrt(kPi * mu);
        out.t_u = invert_taylor_bound(pref, b - s_inf, t0, rho0 - j1_t0);
        out.branch = "taylor";
    } else {
        out.branch = "none (b < s_inf)";
    }
    return out;
}

BoundPair bounds_bounded(const DiracSetup& setup, double rho0) {
    if (!(rho0 > 0.0)) throw std::invalid_argument("bounds_bounded: rho0 must be > 0");
    const double b = setup.params.b();
    const double mu = setup.params.mu;
    const double eps = setup.params.eps;
    const double z = setup.z;
    const double s_inf = setup.s_inf;
    if (!(b > s_inf))
        throw std::invalid_argument("bounds_bounded: needs b > s_inf for the upper bounds");

    BoundPair out;
    const double omega = 2.0 * rho0 * std::sqrt((1.0 - eps) * mu * kPi) /
                         (eps * (std::sqrt(1.0 - eps) + std::sqrt(2.0 * mu)));
    const double lw = std::log(omega);
    out.t_l = (lw + std::sqrt(lw * lw + (z - eps) * (z - eps) / mu)) / (2.0 * (b + 1.0));

    const double a = b - s_inf;
    const double t0 = z / (2.0 * std::sqrt(mu * a));
    const double j1_pref = eps * z / (8.0 * std::exp(1.0) * mu * std::sqrt(kPi));
    const double j1_t0 = j1_pref * std::exp(-z * std::sqrt(a) / std::sqrt(mu));
    if (rho0 < j1_t0) {
        double tu = z * z / (2.0 * mu * std::log(j1_pref / rho0));
        out.t_u = tu;
        out.t_u_inf = tu;
        out.branch = "short-time";
        return out;
    }

    const double e = std::erfc(std::sqrt(3.0 / (mu * t0)));
    if (e > 0.0) {
        out.t_u = t0 + std::log1p(4.0 * std::sqrt(3.0) * a * (rho0 - j1_t0) / (eps * e)) / a;
        out.branch = "erfc";
    } else {
        out.t_u = kInf;  // erfc underflow: this route says nothing at small mu
        out.branch = "erfc-underflow";
    }
    // alternate route: the Neumann kernel dominates the whole-line one
    double pref = eps * std::exp(-a * t0) / (2.0 * std::sqrt(kPi * mu));
    out.t_u_inf = invert_taylor_bound(pref, a, t0, rho0 - j1_t0);
    return out;
}

double kernel_bound_upper(double t, double x, double z, const DiracSetup& setup) {
    require_positive_time(t, "kernel_bound_upper");
    const double eps = setup.params.eps;
    if (!(x > 0.0 && x < eps) || !(z > eps && z < 1.0))
        throw std::invalid_argument("kernel_bound_upper: needs x in (0,eps) and z in (eps,1)");
    const double mu = setup.params.mu;
    const double b = setup.params.b();
    double gap = z - eps;
    return std::exp(b * t - gap * gap / (4.0 * mu * t)) *
           (4.0 / std::sqrt(4.0 * kPi * mu * t) + 2.0 / std::sqrt(2.0 * (1.0 - eps)));
}

double kernel_bound_lower(double t, double x, double z, double mu, double b) {
    require_positive_time(t, "kernel_bound_lower");
    if (!(x >= 0.0 && x <= 1.0 && z >= 0.0 && z <= 1.0))
        throw std::invalid_argument("kernel_bound_lower: needs x, z in [0,1]");
    double s = x + z;
    return std::exp(b * t - s * s / (4.0 * mu * t)) *
           (1.0 / std::sqrt(4.0 * kPi * mu * t) +
            std::erfc(std::sqrt(3.0 / (mu * t))) / (4.0 * std::sqrt(3.0)));
}

} // namespace gcs::green
