#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gcs/fem.hpp"
#include "gcs/green.hpp"
#include "gcs/numerics.hpp"

using namespace gcs;
using namespace gcs::green;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams dirac_params(double mu, double b = 2.0, double eps = 0.1, double rho0 = 1.0) {
    ModelParams p;
    p.q0 = b;
    p.q1 = b;
    p.d = 0.0;
    p.mu = mu;
    p.eps = eps;
    p.s0 = 1.0;
    p.rho0 = rho0;
    return p;
}

DiracSetup bounded_setup(double mu, double b = 2.0, double eps = 0.1, double z = 0.5) {
    return DiracSetup(z, dirac_params(mu, b, eps), DomainSpec{DomainKind::BoundedUnit});
}

DiracSetup free_setup(double mu, double b = 2.0, double eps = 0.1, double z = 0.5) {
    return DiracSetup(z, dirac_params(mu, b, eps), DomainSpec{DomainKind::HalfLineWhole});
}

// quadrature versions of the edge-value integrals behind the whole-line bounds
double i_lower_free(double t, const DiracSetup& s) {
    GaussLegendre gl(16);
    double rate = s.params.b() - s.s_inf;
    return 2.0 * s.params.eps *
           gl.integrate(
               [&](double u) {
                   double tau = u * u;
                   return tau == 0.0 ? 0.0
                                     : 2.0 * u * kernel_free(tau, -s.params.eps, s.z, s.params.mu, rate);
               },
               0.0, std::sqrt(t), 32);
}

double i_upper_free(double t, const DiracSetup& s) {
    GaussLegendre gl(16);
    return 2.0 * s.params.eps *
           gl.integrate(
               [&](double u) {
                   double tau = u * u;
                   return tau == 0.0 ? 0.0
                                     : 2.0 * u * kernel_free(tau, s.params.eps, s.z, s.params.mu,
                                                             s.params.b());
               },
               0.0, std::sqrt(t), 32);
}

double invert_monotone(const std::function<double(double)>& f, double target) {
    double hi = 1e-3;
    while (f(hi) < target) {
        hi *= 2.0;
        REQUIRE(hi < 1e9);
    }
    return bisect([&](double t) { return f(t) - target; }, 0.0, hi, 1e-12, 1e-10);
}

} // namespace

TEST_CASE("kernel_free: unit mass, symmetry, heat-equation residual") {
    double mu = 0.7, t = 0.3, z = 0.4;
    GaussLegendre gl(16);
    double w = 20.0 * std::sqrt(mu * t);
    double m = gl.integrate([&](double x) { return kernel_free(t, x, z, mu, 0.0); }, z - w, z + w, 64);
    CHECK(m == doctest::Approx(1.0).epsilon(1e-8));

    CHECK(kernel_free(t, 0.2, 0.7, mu, 1.3) == doctest::Approx(kernel_free(t, 0.7, 0.2, mu, 1.3)));
    CHECK_THROWS_AS(kernel_free(0.0, 0.1, 0.2, mu, 0.0), std::invalid_argument);

    // central-difference residual of dG/dt - mu G_xx - b G vanishes at O(h^2)
    auto residual = [&](double h) {
        double b = 1.0, x = 0.7;
        double dt_term = (kernel_free(t + h, x, z, mu, b) - kernel_free(t - h, x, z, mu, b)) / (2 * h);
        double dxx = (kernel_free(t, x + h, z, mu, b) - 2 * kernel_free(t, x, z, mu, b) +
                      kernel_free(t, x - h, z, mu, b)) /
                     (h * h);
        return std::abs(dt_term - mu * dxx - b * kernel_free(t, x, z, mu, b));
    };
    double r1 = residual(1e-2), r2 = residual(5e-3);
    CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("kernel_bounded: reflecting mass, zero edge flux, truncation control") {
    double mu = 0.8, z = 0.3, t = 0.37;
    GaussLegendre gl(16);
    double m = gl.integrate([&](double x) { return kernel_bounded(t, x, z, mu, 0.0); }, 0.0, 1.0, 32);
    CHECK(m == doctest::Approx(1.0).epsilon(1e-10));

    double delta = 1e-4;
    double t2 = 0.1;
    double flux0 = (kernel_bounded(t2, delta, z, mu, 2.0) - kernel_bounded(t2, -delta, z, mu, 2.0)) /
                   (2 * delta);
    double flux1 = (kernel_bounded(t2, 1.0 + delta, z, mu, 2.0) -
                    kernel_bounded(t2, 1.0 - delta, z, mu, 2.0)) /
                   (2 * delta);
    CHECK(std::abs(flux0) < 1e-6);
    CHECK(std::abs(flux1) < 1e-6);

    // auto-truncation agrees with a generous explicit image count
    for (double tt : {0.01, 0.37, 3.0}) {
        double a = kernel_bounded(tt, 0.6, z, mu, 1.0);
        double b = kernel_bounded(tt, 0.6, z, mu, 1.0, 300);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("kernel_bounded approaches the fem evolution of a Dirac spike") {
    ModelParams p;
    p.q0 = 0.0;
    p.q1 = 0.0;
    p.d = 0.0;
    p.mu = 0.5;
    p.eps = 1.0;
    p.s0 = 0.0;  // pure diffusion
    p.rho0 = 1.0;
    const double z = 0.5, t = 0.05;
    double prev = 1e9;
    for (int cells : {100, 200, 400}) {
        fem::FemConfig cfg;
        cfg.grid = Grid(cells);
        cfg.dt = 40.0 * 1e-5 / cells;  // refine dt with h so neither error floors
        cfg.t_max = t;
        auto rec = fem::run(DiracInit{z}, p, cfg);
        double err2 = 0.0;
        for (int i = 0; i <= cells; ++i) {
            double d = rec.final_state[i] - kernel_bounded(t, cfg.grid.node(i), z, p.mu, 0.0);
            err2 += (i == 0 || i == cells ? 0.5 : 1.0) * d * d;
        }
        double err = std::sqrt(err2 * cfg.grid.h);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 2e-3);
}

TEST_CASE("rho_dirac: zero at zero, monotone, sandwiches the fem output") {
    auto setup = bounded_setup(1.0);
    auto [l0, u0] = rho_dirac(setup, 0.0);
    CHECK(l0 == 0.0);
    CHECK(u0 == 0.0);

    fem::FemConfig cfg;
    cfg.grid = Grid(400);
    cfg.dt = 1e-4;
    cfg.t_max = 2.0;
    auto rec = fem::run(DiracInit{setup.z}, setup.params, cfg);

    double prev_l = 0.0, prev_u = 0.0;
    for (double t : {0.25, 0.5, 1.0, 1.5, 2.0}) {
        auto [lo, up] = rho_dirac(setup, t);
        CHECK(lo >= prev_l);
        CHECK(up >= prev_u);
        prev_l = lo;
        prev_u = up;
        std::size_t i = 0;
        while (rec.times[i] < t - 1e-12) ++i;
        double rho_fem = rec.rho_series[i];
        CHECK(lo <= rho_fem);
        CHECK(rho_fem <= up);
    }
}

TEST_CASE("j_lower_bound: dominated by the quadrature of J_a, monotone, zero limit") {
    GaussLegendre gl(16);
    auto j_quad = [&](double a, double t) {
        // substitution u = sqrt(s): J_a(t) = 2 int_0^sqrt(t) exp(a u^2 - 1/u^2) du
        return 2.0 * gl.integrate(
                         [&](double u) {
                             return u == 0.0 ? 0.0 : std::exp(a * u * u - 1.0 / (u * u));
                         },
                         0.0, std::sqrt(t), 64);
    };
    for (double a : {0.0, 1.0})
        for (double t : {0.5, 1.0, 5.0}) CHECK(j_quad(a, t) >= j_lower_bound(a, t));
    CHECK(j_lower_bound(0.0, 0.0) == 0.0);
    CHECK(j_lower_bound(0.0, 1e-6) < 1e-300);
    double prev = 0.0;
    for (double t : {0.1, 0.5, 1.0, 2.0, 10.0}) {
        CHECK(j_lower_bound(1.0, t) >= prev);
        prev = j_lower_bound(1.0, t);
    }
}

TEST_CASE("bounds_free: closed forms sandwich the quadrature crossing times") {
    for (int i = 0; i < 20; ++i) {
        double mu = std::pow(10.0, -2.0 + 4.0 * i / 19.0);
        auto setup = free_setup(mu);
        auto bp = bounds_free(setup, 1.0);
        double t_iu = invert_monotone([&](double t) { return i_upper_free(t, setup); }, 1.0);
        double t_il = invert_monotone([&](double t) { return i_lower_free(t, setup); }, 1.0);
        REQUIRE(bp.t_u.has_value());
        CHECK(bp.t_l <= t_iu * (1.0 + 1e-9));
        CHECK(t_iu <= t_il * (1.0 + 1e-9));
        CHECK(t_il <= *bp.t_u * (1.0 + 1e-9));
    }
}

TEST_CASE("bounds_free: divergence at both mutation extremes") {
    // mu -> 0: t_l ~ (z - eps)/(2(b+1)) / sqrt(mu)
    std::vector<double> lm, lt;
    for (double mu : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
        auto bp = bounds_free(free_setup(mu), 1.0);
        lm.push_back(std::log(mu));
        lt.push_back(std::log(bp.t_l));
    }
    double slope = fit_slope(lm, lt);
    CHECK(slope == doctest::Approx(-0.5).epsilon(0.1));

    // mu -> infinity: the upper bound grows, but only polynomially
    std::vector<double> lm2, lt2;
    for (double mu : {1e2, 1e3, 1e4, 1e5}) {
        auto bp = bounds_free(free_setup(mu), 1.0);
        REQUIRE(bp.t_u.has_value());
        lm2.push_back(std::log(mu));
        lt2.push_back(std::log(*bp.t_u));
    }
    CHECK(bounds_free(free_setup(1e5), 1.0).t_l > bounds_free(free_setup(1e2), 1.0).t_l * 0.99);
    CHECK(fit_slope(lm2, lt2) < 1.0);
    CHECK(fit_slope(lm2, lt2) > 0.0);
}

TEST_CASE("bounds_bounded: fem crossing inside the interval at three mutation rates") {
    for (double mu : {0.01, 1.0, 100.0}) {
        auto setup = bounded_setup(mu);
        auto bp = bounds_bounded(setup, 1.0);
        double t_fem = fem::time_to_threshold_numeric(DiracInit{0.5}, setup.params, Grid(400), 1e-3);
        auto tu = bp.t_upper();
        REQUIRE(tu.has_value());
        CHECK(bp.t_l <= t_fem);
        CHECK(t_fem <= *tu);
    }
}

TEST_CASE("bounds_bounded: large-mu limits of both bounds") {
    double b = 2.0, eps = 0.1, rho0 = 1.0, s_inf = 1.0, z = 0.5;
    auto bp = bounds_bounded(bounded_setup(1e12), rho0);
    double t_lower_limit = std::log(rho0 * std::sqrt(2.0 * kPi * (1.0 - eps)) / eps) / (b + 1.0);
    CHECK(bp.t_l == doctest::Approx(t_lower_limit).epsilon(1e-3));
    double a = b - s_inf;
    double t0 = z / (2.0 * std::sqrt(1e12 * a));
    double t_upper_limit = t0 + std::log1p(4.0 * std::sqrt(3.0) * a * rho0 / eps) / a;
    REQUIRE(bp.t_u.has_value());
    CHECK(*bp.t_u == doctest::Approx(t_upper_limit).epsilon(0.01));
}

TEST_CASE("bounds_bounded: small-mu slope of the lower bound and the alternate upper bound") {
    std::vector<double> lm, lt;
    for (double mu : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
        auto bp = bounds_bounded(bounded_setup(mu), 1.0);
        lm.push_back(std::log(mu));
        lt.push_back(std::log(bp.t_l));
    }
    CHECK(fit_slope(lm, lt) == doctest::Approx(-0.5).epsilon(0.1));

    auto bp = bounds_bounded(bounded_setup(0.01), 1.0);
    REQUIRE(bp.t_u.has_value());
    REQUIRE(bp.t_u_inf.has_value());
    CHECK(*bp.t_u_inf < *bp.t_u);  // whole-line route is sharper at small mu
}

TEST_CASE("bounds_bounded: rejects growth below the selection amplitude") {
    auto setup = bounded_setup(1.0, 0.5);  // b = 0.5 < s_inf = 1
    CHECK_THROWS_AS(bounds_bounded(setup, 1.0), std::invalid_argument);
}

TEST_CASE("kernel_bound_upper dominates the image sum inside the window") {
    auto setup = bounded_setup(1.0);
    for (double t : {1e-4, 1e-2, 0.1, 0.5, 2.0}) {
        for (double x : {0.01, 0.05, 0.09}) {
            double k = kernel_bounded(t, x, setup.z, setup.params.mu, setup.params.b());
            double bound = kernel_bound_upper(t, x, setup.z, setup);
            CHECK(k <= bound);
            CHECK(bound / std::max(k, 1e-300) >= 1.0);
        }
    }
    CHECK_THROWS_AS(kernel_bound_upper(0.1, 0.5, 0.7, setup), std::invalid_argument);
    // monotone in the growth rate
    auto fast = bounded_setup(1.0, 3.0);
    CHECK(kernel_bound_upper(0.5, 0.05, 0.5, fast) > kernel_bound_upper(0.5, 0.05, 0.5, setup));
}

TEST_CASE("kernel_bound_lower is dominated by the image sum") {
    double mu = 1.0, b = 2.0, z = 0.5;
    for (double t : {1e-3, 0.1, 0.5, 2.0})
        for (double x : {0.0, 0.3, 0.7, 1.0})
            CHECK(kernel_bounded(t, x, z, mu, b) >= kernel_bound_lower(t, x, z, mu, b));

    // t -> infinity at b = 0: the erfc term alone survives, erfc(0) = 1
    double late = kernel_bound_lower(1e6, 0.2, 0.3, 1.0, 0.0);
    CHECK(late == doctest::Approx(1.0 / (4.0 * std::sqrt(3.0))).epsilon(0.05));

    // largest Gaussian factor sits at x = z = 0
    CHECK(kernel_bound_lower(0.5, 0.0, 0.0, 1.0, 2.0) >= kernel_bound_lower(0.5, 0.4, 0.3, 1.0, 2.0));
}

TEST_CASE("erfc agrees with its Maclaurin series to 12 digits") {
    // x <= 2 keeps the 30-term truncation and the alternating-sum
    // cancellation below the comparison tolerance
    for (int i = 0; i < 10; ++i) {
        double x = 0.1 + 1.9 * i / 9.0;
        double series = 0.0, term = x;
        for (int n = 0; n < 30; ++n) {
            series += (n % 2 == 0 ? term : -term) / (2 * n + 1);
            term = term * x * x / (n + 1);
        }
        double erfc_series = 1.0 - 2.0 / std::sqrt(kPi) * series;
        CHECK(std::erfc(x) == doctest::Approx(erfc_series).epsilon(1e-12));
    }
}
