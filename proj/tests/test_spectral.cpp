#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "gcs/fem.hpp"
#include "gcs/numerics.hpp"
#include "gcs/oracles.hpp"
#include "gcs/spectral.hpp"

using namespace gcs;
using namespace gcs::spectral;

namespace {

constexpr double kPi = std::numbers::pi;

ModelParams make_params(double mu, double eps, double s0 = 1.0, double b = 2.0) {
    ModelParams p;
    p.q0 = b;
    p.q1 = 0.0;
    p.d = 0.0;
    p.mu = mu;
    p.eps = eps;
    p.s0 = s0;
    p.rho0 = 1.0;
    return p;
}

} // namespace

TEST_CASE("characteristic_value: vanishing window leaves the Neumann Laplacian") {
    ModelParams p = make_params(1.0, 1e-8);
    double g8 = characteristic_value(p.mu * kPi * kPi, p);
    CHECK(std::abs(g8) < 1e-6);
    p.eps = 1e-6;
    double g6 = characteristic_value(p.mu * kPi * kPi, p);
    CHECK(std::abs(g8) < std::abs(g6));  // zero is approached as eps -> 0
}

TEST_CASE("characteristic_value: sign change brackets each first-order prediction") {
    ModelParams p = make_params(1.0, 0.1);
    for (int k = 0; k <= 3; ++k) {
        double pred = p.mu * (k * kPi) * (k * kPi) + p.eps * (k == 0 ? 1.0 : 2.0);
        double c = 3.0 * (k + 1) * kPi * std::pow(p.eps, 1.5);
        CHECK(characteristic_value(pred - c, p) * characteristic_value(pred + c, p) < 0.0);
    }
}

TEST_CASE("characteristic_value: sign-change count matches the matrix oracle") {
    ModelParams p = make_params(1.0, 0.1);
    const double cut = 250.0;
    int changes = 0;
    double prev = characteristic_value(0.0, p);
    for (double lam = 0.01; lam <= cut; lam += 0.01) {
        double cur = characteristic_value(lam, p);
        if (prev * cur < 0.0) ++changes;
        prev = cur;
    }
    int oracle = oracles::fem_pencil_count_below(p, SelectionProfile::indicator(p.eps, p.s0), 4000, cut);
    CHECK(changes == oracle);
}

TEST_CASE("eigs_exact: full window is a constant-potential shift") {
    ModelParams p = make_params(0.7, 1.0, 1.3);
    auto pairs = eigs_exact(p, 5, Grid(400));
    for (int k = 0; k < 5; ++k)
        CHECK(pairs[k].lambda ==
              doctest::Approx(p.s0 + p.mu * (k * kPi) * (k * kPi)).epsilon(1e-10));
}

TEST_CASE("eigs_exact: eigenvalues within the first-order asymptotic band") {
    ModelParams p = make_params(1.0, 0.1);
    Grid g(800);
    auto pairs = eigs_exact(p, 12, g);
    auto asym = eigs_asymptotic(p, 12, g);
    for (int k = 0; k < 12; ++k) {
        CHECK(pairs[k].k == k);
        double gap = std::abs(pairs[k].lambda - asym[k].lambda_first_order);
        CHECK(gap <= 2.0 * (k + 1) * kPi * std::pow(p.eps, 1.5));
    }
    // eigenvalues strictly increasing
    for (int k = 1; k < 12; ++k) CHECK(pairs[k].lambda > pairs[k - 1].lambda);
}

TEST_CASE("eigs_exact: agreement with the tridiagonal pencil oracle") {
    for (auto [mu, eps] : {std::pair{1.0, 0.1}, std::pair{0.1, 0.2}, std::pair{5.0, 0.05}}) {
        ModelParams p = make_params(mu, eps);
        auto pairs = eigs_exact(p, 8, Grid(800));
        auto oracle = oracles::fem_pencil_eigenvalues(p, SelectionProfile::indicator(eps, p.s0), 5000, 8);
        for (int k = 0; k < 8; ++k)
            CHECK(std::abs(pairs[k].lambda - oracle[k]) / std::max(1.0, oracle[k]) < 1e-5);
    }
}

TEST_CASE("eigs_exact: orthonormal family with the right sign and zero counts") {
    ModelParams p = make_params(1.0, 0.1);
    Grid g(800);
    auto pairs = eigs_exact(p, 32, g);
    for (int i = 0; i < 32; ++i) {
        CHECK(pairs[i].vector[0] > 0.0);
        for (int j = i; j < 32; ++j) {
            double gram = inner_product(pairs[i].vector, pairs[j].vector);
            CHECK(std::abs(gram - (i == j ? 1.0 : 0.0)) < 1e-8);
        }
    }
}

TEST_CASE("eigs_exact: integrated eigen-identity <s,Vk> = lambda_k int Vk") {
    ModelParams p = make_params(0.5, 0.3);
    Grid g(800);
    auto s = SelectionProfile::indicator(p.eps, p.s0);
    // holds analytically; sampled vectors leave O(h^2) interpolation error
    for (const auto& ep : eigs_exact(p, 8, g))
        CHECK(weighted_mass(s, ep.vector) == doctest::Approx(ep.lambda * mass(ep.vector)).epsilon(1e-4));
}

TEST_CASE("eigs_exact: shifted-operator eigenvalue bounds, even-mode indexing") {
    for (double mu : {0.5, 1.0}) {
        ModelParams p = make_params(mu, 0.1);
        auto pairs = eigs_exact(p, 8, Grid(400));
        double m = std::min(p.mu, 1.0);            // inf of min(mu, s+1)
        double M = std::max(p.mu, 1.0 + p.s0);     // sup of max(mu, s+1)
        for (int k = 0; k < 8; ++k) {
            double nu = (k * kPi) * (k * kPi) + 1.0;  // half-domain mode k = even mode 2k
            CHECK(pairs[k].lambda + 1.0 >= m * nu * (1.0 - 1e-9));
            CHECK(pairs[k].lambda + 1.0 <= M * nu * (1.0 + 1e-9));
        }
    }
}

TEST_CASE("eigs_exact: residual of the analytic eigenvector decays at second order") {
    ModelParams p = make_params(1.0, 0.25);
    auto residual = [&](int cells) {
        Grid g(cells);
        auto pairs = eigs_exact(p, 3, g);
        const auto& ep = pairs[2];
        auto s = SelectionProfile::indicator(p.eps, p.s0);
        double worst = 0.0;
        for (int i = 1; i < g.n_cells; ++i) {
            double x = g.node(i);
            if (std::abs(x - p.eps) <= g.h) continue;  // kink cell: s jumps inside
            double lap = (ep.vector[i - 1] - 2.0 * ep.vector[i] + ep.vector[i + 1]) / (g.h * g.h);
            double r = -p.mu * lap + s.value(x) * ep.vector[i] - ep.lambda * ep.vector[i];
            worst = std::max(worst, std::abs(r));
        }
        return worst;
    };
    double r1 = residual(200);
    double r2 = residual(400);
    CHECK(r1 / r2 > 3.0);
    CHECK(r2 < 1e-2);
}

TEST_CASE("eigs_asymptotic: closed-form values and corrector orthogonality") {
    Grid g(1000);
    ModelParams p = make_params(1.0, 0.1);
    auto asym = eigs_asymptotic(p, 3, g);

    CHECK(asym[0].lambda_first_order == doctest::Approx(p.eps).epsilon(1e-14));
    CHECK(asym[1].lambda_first_order == doctest::Approx(kPi * kPi + 2.0 * p.eps).epsilon(1e-14));
    CHECK(asym[0].lambda1 == doctest::Approx(1.0));
    CHECK(asym[1].lambda1 == doctest::Approx(2.0));

    // v1_0 = -(sbar/mu) x^2/2 plus the constant sbar/(6 mu) fixed by <v1,v0> = 0
    const double c = 1.0 / 6.0;
    for (int i : {0, g.n_cells / 2, g.n_cells}) {
        double x = g.node(i);
        CHECK(asym[0].v1[i] == doctest::Approx(-x * x / 2.0 + c).epsilon(1e-4));
    }
    for (int k = 0; k < 3; ++k)
        CHECK(std::abs(inner_product(asym[k].v1, asym[k].v0)) < 1e-12);
}

TEST_CASE("corrector_pi2: canonical fast profile") {
    auto s = SelectionProfile::indicator(1.0, 1.0);  // s = 1 on [0,1] in the fast variable
    double mu = 2.0;
    CHECK(corrector_pi2(0.0, s, mu) == 0.0);
    CHECK(corrector_pi2(0.5, s, mu) == doctest::Approx(0.25 / 2.0 / mu).epsilon(1e-14));
    CHECK(corrector_pi2(2.0, s, mu) == doctest::Approx((2.0 - 0.5) / mu).epsilon(1e-14));
    CHECK(corrector_pi2_deriv(0.5, s, mu) == doctest::Approx(0.5 / mu).epsilon(1e-14));
    CHECK(corrector_pi2_deriv(1.7, s, mu) == doctest::Approx(s.sbar() / mu).epsilon(1e-14));
    CHECK_THROWS_AS(corrector_pi2(-0.1, s, mu), std::invalid_argument);
}

TEST_CASE("modal_solution: projection at t = 0 and single-mode growth") {
    ModelParams p = make_params(1.0, 0.1);
    Grid g(400);
    auto pairs = eigs_exact(p, 6, g);
    auto s = SelectionProfile::indicator(p.eps, p.s0);

    Field init(g, 0.0);
    for (int i = 0; i < init.size(); ++i)
        init[i] = pairs[0].vector[i] + 0.3 * pairs[2].vector[i];
    auto coeffs = modal_coefficients(init, s, pairs, p.b());
    auto rec = modal_solution(coeffs, pairs, 0.0);
    for (int i = 0; i < init.size(); i += 17)
        CHECK(rec.field[i] == doctest::Approx(init[i]).epsilon(1e-7));

    auto single = modal_coefficients(pairs[0].vector, s, pairs, p.b());
    double t = 0.7;
    auto grown = modal_solution(single, pairs, t);
    double amp = std::exp((p.b() - pairs[0].lambda) * t);
    for (int i = 0; i < grown.field.size(); i += 29)
        CHECK(grown.field[i] == doctest::Approx(amp * pairs[0].vector[i]).epsilon(1e-7));
    CHECK(grown.remainder_bound ==
          doctest::Approx(std::exp((p.b() - pairs[5].lambda) * t)).epsilon(1e-6));
}

TEST_CASE("rho_spectral: zero at t = 0 and uniform-window closed form") {
    ModelParams p = make_params(1.0, 1.0);  // window covers the domain
    Grid g(400);
    auto pairs = eigs_exact(p, 8, g);
    auto s = SelectionProfile::indicator(1.0, 1.0);
    auto coeffs = modal_coefficients(Field(g, 1.0), s, pairs, p.b());
    CHECK(rho_spectral(coeffs, 0.0) == 0.0);
    for (double t : {0.5, 1.0, 2.0}) {
        double closed = p.s0 * std::expm1((p.b() - p.s0) * t) / (p.b() - p.s0);
        CHECK(rho_spectral(coeffs, t) == doctest::Approx(closed).epsilon(1e-9));
    }
}

TEST_CASE("rho_spectral: degenerate growth rate falls back to the linear term") {
    ModelParams p = make_params(1.0, 1.0, 1.0, 1.0);  // b = s0 = 1: b - lambda_0 = 0
    Grid g(200);
    auto pairs = eigs_exact(p, 4, g);
    auto coeffs = modal_coefficients(Field(g, 1.0), SelectionProfile::indicator(1.0, 1.0), pairs, p.b());
    CHECK(std::abs(p.b() - coeffs.lambda[0]) < 1e-10);
    for (double t : {0.5, 2.0})
        CHECK(rho_spectral(coeffs, t) == doctest::Approx(p.s0 * t).epsilon(1e-9));
}

TEST_CASE("time_to_threshold_spectral: uniform window gives ln 2") {
    ModelParams p = make_params(1.0, 1.0);
    Grid g(400);
    auto pairs = eigs_exact(p, 8, g);
    auto coeffs = modal_coefficients(Field(g, 1.0), SelectionProfile::indicator(1.0, 1.0), pairs, p.b());
    CHECK(time_to_threshold_spectral(coeffs, 1.0) == doctest::Approx(std::log(2.0)).epsilon(1e-9));
}

TEST_CASE("time_to_threshold_spectral: unreachable threshold reports the finite limit") {
    ModelParams p = make_params(1.0, 0.1, 1.0, 0.0);  // b = 0 < lambda_0
    Grid g(400);
    auto pairs = eigs_exact(p, 8, g);
    auto coeffs = modal_coefficients(Field(g, 1.0), SelectionProfile::indicator(0.1, 1.0), pairs, 0.0);
    CHECK_THROWS_AS(time_to_threshold_spectral(coeffs, 5.0), UnreachableThreshold);
    CHECK_NOTHROW(time_to_threshold_spectral(coeffs, 0.5));
}

TEST_CASE("spectral vs fem: threshold times agree on random parameter draws") {
    std::uint64_t seed = 99;
    auto next = [&]() {
        seed += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = seed;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return static_cast<double>((z ^ (z >> 31)) >> 11) * 0x1.0p-53;
    };
    Grid g(400);
    for (int trial = 0; trial < 10; ++trial) {
        ModelParams p = make_params(0.5 + 1.5 * next(), 0.05 + 0.25 * next(), 1.0,
                                    1.0 + 2.0 * next());
        p.rho0 = 0.5 + 4.5 * next();
        auto pairs = eigs_exact(p, 48, g);
        auto coeffs = modal_coefficients(Field(g, 1.0), SelectionProfile::indicator(p.eps, p.s0),
                                         pairs, p.b());
        double t_spec = time_to_threshold_spectral(coeffs, p.rho0);
        double t_fem = fem::time_to_threshold_numeric(ConstantInit{1.0}, p, g, 1e-4);
        CHECK(std::abs(t_fem - t_spec) / t_spec < 1e-3);
    }
}

TEST_CASE("modal solution matches a Richardson-extrapolated fem snapshot") {
    ModelParams p = make_params(1.0, 0.1);
    p.rho0 = 1e9;
    Grid g(400);
    auto pairs = eigs_exact(p, 64, g);
    auto coeffs = modal_coefficients(Field(g, 1.0), SelectionProfile::indicator(p.eps, p.s0),
                                     pairs, p.b());
    auto modal = modal_solution(coeffs, pairs, 1.0);

    auto fem_at = [&](double dt) {
        fem::FemConfig cfg;
        cfg.grid = g;
        cfg.dt = dt;
        cfg.t_max = 1.0;
        return fem::run(ConstantInit{1.0}, p, cfg).final_state;
    };
    Field a = fem_at(1e-5), b = fem_at(5e-6);
    double err2 = 0.0;
    for (int i = 0; i <= g.n_cells; ++i) {
        double extrap = 2.0 * b[i] - a[i];
        double d = modal.field[i] - extrap;
        err2 += (i == 0 || i == g.n_cells ? 0.5 : 1.0) * d * d;
    }
    CHECK(std::sqrt(err2 * g.h) < 1e-4);
}

TEST_CASE("rho series: spectral sum tracks fem through a large-threshold run") {
    // slow-diffusion regime with a high threshold; rho grows to O(100)
    ModelParams p = make_params(8.0 / (kPi * kPi), 0.1);
    p.rho0 = 100.0;
    Grid g(400);
    auto pairs = eigs_exact(p, 48, g);
    auto coeffs = modal_coefficients(Field(g, 1.0), SelectionProfile::indicator(p.eps, p.s0),
                                     pairs, p.b());

    fem::FemConfig cfg;
    cfg.grid = g;
    cfg.dt = 1e-5;
    cfg.t_max = 2.0;
    auto rec = fem::run(ConstantInit{1.0}, p, cfg);
    for (double t : {1.0, 2.0}) {
        std::size_t i = 0;
        while (rec.times[i] < t - 1e-12) ++i;
        double rho_fem = rec.rho_series[i];
        CHECK(rho_spectral(coeffs, t) == doctest::Approx(rho_fem).epsilon(1e-4));
    }
}

TEST_CASE("first-order eigenvalue error is O(eps^{3/2}) across the window ladder") {
    std::vector<double> le, lg;
    for (double eps : {0.2, 0.1, 0.05, 0.025}) {
        ModelParams p = make_params(1.0, eps);
        Grid g(800);
        auto pairs = eigs_exact(p, 4, g);
        auto asym = eigs_asymptotic(p, 4, g);
        double worst = 0.0;
        for (int k = 0; k <= 3; ++k)
            worst = std::max(worst,
                             std::abs(pairs[k].lambda - asym[k].lambda_first_order) / ((k + 1) * kPi));
        le.push_back(std::log(eps));
        lg.push_back(std::log(worst));
    }
    CHECK(fit_slope(le, lg) >= 1.4);
}

TEST_CASE("selected-overlap coefficient is eps*phi0 + O(eps^2)") {
    Grid g(2000);
    // generic datum: nonzero projection on every tested mode
    Field init = Field::sample(g, [](double x) { return 1.0 + x * x; });
    const double b = 2.0;
    for (int k = 0; k <= 2; ++k) {
        std::vector<double> le, lg;
        for (double eps : {0.2, 0.1, 0.05, 0.025}) {
            ModelParams p = make_params(1.0, eps, 1.0, b);
            auto pairs = eigs_exact(p, k + 1, g);
            auto coeffs = modal_coefficients(init, SelectionProfile::indicator(eps, 1.0), pairs, b);
            double v0_at_0 = (k == 0) ? 1.0 : std::sqrt(2.0);
            Field v0 = (k == 0) ? Field(g, 1.0) : Field::sample(g, [&](double x) {
                return std::sqrt(2.0) * std::cos(k * kPi * x);
            });
            double phi0 = inner_product(init, v0) * 1.0 * v0_at_0 / (b - (k * kPi) * (k * kPi));
            le.push_back(std::log(eps));
            lg.push_back(std::log(std::abs(coeffs.phi[k] - eps * phi0)));
        }
        CHECK(fit_slope(le, lg) >= 1.8);
    }
}

TEST_CASE("overlap_matrix: closed forms, symmetry, quadrature spot check") {
    double eps = 0.17, s0 = 1.4;
    auto M = overlap_matrix(SelectionProfile::indicator(eps, s0), 6);
    CHECK(M[0][0] == doctest::Approx(eps * s0).epsilon(1e-14));
    for (int k = 1; k < 6; ++k)
        CHECK(M[0][k] ==
              doctest::Approx(std::sqrt(2.0) * s0 * std::sin(k * kPi * eps) / (k * kPi)).epsilon(1e-13));
    for (int i = 0; i < 6; ++i)
        for (int k = 0; k < 6; ++k) CHECK(M[i][k] == doctest::Approx(M[k][i]).epsilon(1e-14));

    // quadrature oracle for M[1][2]
    GaussLegendre gl(32);
    double quad = gl.integrate(
        [&](double x) {
            return s0 * 2.0 * std::cos(1 * kPi * x) * std::cos(2 * kPi * x);
        },
        0.0, eps, 8);
    CHECK(std::abs(M[1][2] - quad) < 1e-10);
}

TEST_CASE("modal_cascade: zero initial condition and secular growth of the flat mode") {
    const int K = 12;
    double eps = 0.1, b = 2.0;
    auto M = overlap_matrix(SelectionProfile::indicator(eps, 1.0), K);
    Grid g(1000);
    Field init = Field::sample(g, [](double x) { return 1.0 + x; });
    std::vector<double> nI_modes(K);
    for (int k = 0; k < K; ++k) {
        Field v = (k == 0) ? Field(g, 1.0) : Field::sample(g, [&](double x) {
            return std::sqrt(2.0) * std::cos(k * kPi * x);
        });
        nI_modes[k] = inner_product(init, v);
    }
    std::vector<double> t_grid;
    for (int i = 0; i <= 4000; ++i) t_grid.push_back(50.0 * i / 4000.0);
    auto gamma = modal_cascade(nI_modes, M, b, 3, t_grid);

    for (int j = 1; j <= 3; ++j) CHECK(gamma[j][0][0] == 0.0);

    auto ratio_at = [&](int j, int ti) {
        double t = t_grid[ti];
        double model = nI_modes[0];
        for (int l = 1; l <= j; ++l) model *= (b - M[0][0]) * t / l;
        return gamma[j][0][ti] / model;
    };
    for (int j = 1; j <= 3; ++j) {
        double r50 = ratio_at(j, 4000);
        double r10 = ratio_at(j, 800);
        CHECK(r50 == doctest::Approx(1.0).epsilon(0.05));
        CHECK(std::abs(r50 - 1.0) <= std::abs(r10 - 1.0) + 1e-12);
    }

    // rescaled cascade (growth replaced by the window mean): no secular blowup
    auto quiet = modal_cascade(nI_modes, M, M[0][0], 3, t_grid);
    for (int j = 1; j <= 3; ++j) {
        std::vector<double> lt, ln;
        for (int ti = 800; ti <= 4000; ti += 800) {
            double norm2 = 0.0;
            for (int k = 0; k < K; ++k) norm2 += quiet[j][k][ti] * quiet[j][k][ti];
            lt.push_back(std::log(1.0 + t_grid[ti]));
            ln.push_back(0.5 * std::log(norm2));
        }
        CHECK(fit_slope(lt, ln) <= j - 1 + 0.1);
    }
}
