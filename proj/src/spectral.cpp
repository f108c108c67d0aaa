#include "gcs/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gcs/numerics.hpp"

namespace gcs::spectral {

namespace {

constexpr double kPi = std::numbers::pi;

// sin(sqrt(u))/sqrt(u), continued to sinh(sqrt(-u))/sqrt(-u) for u < 0.
double sinc_sqrt(double u) {
    if (std::abs(u) < 1e-4)
        return 1.0 - u / 6.0 + u * u / 120.0 - u * u * u / 5040.0;
    if (u > 0.0) {
        double r = std::sqrt(u);
        return std::sin(r) / r;
    }
    double r = std::sqrt(-u);
    return std::sinh(r) / r;
}

// cos(sqrt(u)), continued to cosh(sqrt(-u)) for u < 0.
double cos_sqrt(double u) {
    if (std::abs(u) < 1e-4)
        return 1.0 - u / 2.0 + u * u / 24.0 - u * u * u / 720.0;
    if (u > 0.0) return std::cos(std::sqrt(u));
    return std::cosh(std::sqrt(-u));
}

// Transfer-matrix eigenvector: V(x) = cos(w0 x) inside the window, continued
// with value and derivative across the window edge.  Real arithmetic on both
// trigonometric and hyperbolic branches.
double eigenvector_value(double x, double lambda, const ModelParams& p) {
    const double w0sq = (lambda - p.s0) / p.mu;
    const double w1sq = lambda / p.mu;
    const double e = p.eps;
    if (x <= e || e >= 1.0) return cos_sqrt(w0sq * x * x);
    const double ve = cos_sqrt(w0sq * e * e);
    const double dve = -w0sq * e * sinc_sqrt(w0sq * e * e);
    const double d = x - e;
    return ve * cos_sqrt(w1sq * d * d) + dve * d * sinc_sqrt(w1sq * d * d);
}

int count_sign_changes(const std::vector<double>& v) {
    int changes = 0;
    double last = 0.0;
    for (double x : v) {
        if (x == 0.0) continue;
        if (last != 0.0 && ((x > 0.0) != (last > 0.0))) ++changes;
        last = x;
    }
    return changes;
}

std::vector<double> scan_roots(const ModelParams& p, int K, double step) {
    std::vector<double> roots;
    auto g = [&](double lam) { return characteristic_value(lam, p); };
    const double lam_max = p.s0 + p.mu * kPi * kPi * double(K + 2) * double(K + 2) + 10.0 * step;
    double lo = 0.0;
    double glo = g(lo);
    while (static_cast<int>(roots.size()) < K) {
        double hi = lo + step;
        if (hi > lam_max)
            throw RootCountError("eigs_exact: ran past the spectral bound with only " +
                                 std::to_string(roots.size()) + " of " + std::to_string(K) +
                                 " roots bracketed");
        double ghi = g(hi);
        if (glo == 0.0) {
            roots.push_back(lo);
        } else if (glo * ghi < 0.0) {
            roots.push_back(bisect(g, lo, hi, 1e-14, 1e-12));
        }
        lo = hi;
        glo = ghi;
    }
    return roots;
}

Field normalized_vector(double lambda, const ModelParams& p, const Grid& grid) {
    Field v = Field::sample(grid, [&](double x) { return eigenvector_value(x, lambda, p); });
    double nrm = l2_norm(v);
    for (double& x : v.values) x /= nrm;
    return v;  // V(0) = 1/nrm > 0, sign convention holds by construction
}

std::vector<EigenPair> neumann_laplacian_modes(const ModelParams& p, int K, const Grid& grid) {
    std::vector<EigenPair> out;
    for (int k = 0; k < K; ++k) {
        Field v = (k == 0) ? Field(grid, 1.0)
                           : Field::sample(grid, [&](double x) {
                                 return std::sqrt(2.0) * std::cos(k * kPi * x);
                             });
        double nrm = l2_norm(v);
        for (double& x : v.values) x /= nrm;
        out.push_back({k, p.mu * (k * kPi) * (k * kPi), std::move(v)});
    }
    return out;
}

} // namespace

double characteristic_value(double lambda, const ModelParams& params) {
    const double mu = params.mu;
    const double e = params.eps;
    const double L = 1.0 - e;
    const double w0sq = (lambda - params.s0) / mu;
    const double w1sq = lambda / mu;
    return w0sq * e * sinc_sqrt(w0sq * e * e) * cos_sqrt(w1sq * L * L) +
           w1sq * L * cos_sqrt(w0sq * e * e) * sinc_sqrt(w1sq * L * L);
}

std::vector<EigenPair> eigs_exact(const ModelParams& params, int K, const Grid& grid) {
    params.validate();
    if (K < 1) throw std::invalid_argument("eigs_exact: K must be >= 1");
    if (params.s0 == 0.0) return neumann_laplacian_modes(params, K, grid);

    double step = std::min(params.mu * kPi * kPi / 8.0, params.s0 / 8.0);
    std::string diag;
    for (int attempt = 0; attempt < 3; ++attempt, step *= 0.5) {
        std::vector<double> roots = scan_roots(params, K, step);
        std::vector<EigenPair> out;
        bool ok = true;
        for (int k = 0; k < K; ++k) {
            EigenPair ep{k, roots[k], normalized_vector(roots[k], params, grid)};
            int zeros = count_sign_changes(ep.vector.values);
            if (zeros != k) {
                ok = false;
                diag = "mode " + std::to_string(k) + " at lambda=" + std::to_string(roots[k]) +
                       " has " + std::to_string(zeros) + " zeros";
                break;
            }
            out.push_back(std::move(ep));
        }
        if (ok) return out;
    }
    throw RootCountError("eigs_exact: zero-count mismatch persists after refinement (" + diag +
                         "); a mode was likely missed by the scan");
}

std::vector<AsymptoticEigen> eigs_asymptotic(const ModelParams& params, int K, const Grid& grid) {
    params.validate();
    if (K < 1) throw std::invalid_argument("eigs_asymptotic: K must be >= 1");
    const double sbar = params.s0;  // fast-profile integral for the canonical window
    std::vector<AsymptoticEigen> out;
    for (int k = 0; k < K; ++k) {
        AsymptoticEigen a;
        a.k = k;
        a.lambda0 = params.mu * (k * kPi) * (k * kPi);
        a.lambda1 = (k == 0) ? sbar : 2.0 * sbar;
        a.lambda_first_order = a.lambda0 + params.eps * a.lambda1;
        a.v0 = (k == 0) ? Field(grid, 1.0)
                        : Field::sample(grid, [&](double x) {
                              return std::sqrt(2.0) * std::cos(k * kPi * x);
                          });
        const double c = sbar / params.mu;
        if (k == 0) {
            a.v1 = Field::sample(grid, [&](double x) { return -c * x * x / 2.0; });
        } else {
            const double kk = (k * kPi) * (k * kPi);
            a.v1 = Field::sample(grid, [&](double x) {
                double v0 = std::sqrt(2.0) * std::cos(k * kPi * x);
                double dv0 = -std::sqrt(2.0) * k * kPi * std::sin(k * kPi * x);
                return -c * ((1.0 - x) * dv0 / kk + x * v0);
            });
        }
        // fix the multiple-of-v0 ambiguity by orthogonality
        double proj = inner_product(a.v1, a.v0) / inner_product(a.v0, a.v0);
        for (int i = 0; i < a.v1.size(); ++i) a.v1[i] -= proj * a.v0[i];
        out.push_back(std::move(a));
    }
    return out;
}

double corrector_pi2(double y, const SelectionProfile& s_fast, double mu) {
    if (y < 0.0) throw std::invalid_argument("corrector_pi2: y must be >= 0");
    // pi2(y) = (1/mu) int_0^y S1(z) dz with S1(z) = int_0^min(z,1) s; S1 is
    // piecewise linear, so per-interval trapezoids are exact.
    const auto& e = s_fast.edges();
    double acc = 0.0;
    double s1_lo = 0.0;
    for (std::size_t j = 0; j + 1 < e.size(); ++j) {
        double a = e[j];
        double b = std::min(e[j + 1], y);
        double s1_hi_full = s_fast.integral(0.0, e[j + 1]);
        if (b > a) {
            double s1_b = s_fast.integral(0.0, b);
            acc += (b - a) * 0.5 * (s1_lo + s1_b);
        }
        s1_lo = s1_hi_full;
        if (y <= e[j + 1]) break;
    }
    if (y > 1.0) acc += (y - 1.0) * s_fast.sbar();
    return acc / mu;
}

double corrector_pi2_deriv(double y, const SelectionProfile& s_fast, double mu) {
    if (y < 0.0) throw std::invalid_argument("corrector_pi2_deriv: y must be >= 0");
    return s_fast.integral(0.0, std::min(y, 1.0)) / mu;
}

ModalCoefficients modal_coefficients(const Field& n_initial, const SelectionProfile& s,
                                     const std::vector<EigenPair>& pairs, double b) {
    ModalCoefficients c;
    c.b = b;
    c.n_initial_l2 = l2_norm(n_initial);
    for (const EigenPair& ep : pairs) {
        double a = inner_product(n_initial, ep.vector);
        double sk = weighted_mass(s, ep.vector);
        c.lambda.push_back(ep.lambda);
        c.alpha0.push_back(a);
        c.s_overlap.push_back(sk);
        double growth = b - ep.lambda;
        c.phi.push_back(std::abs(growth) < 1e-10 ? std::numeric_limits<double>::quiet_NaN()
                                                 : a * sk / growth);
    }
    return c;
}

ModalSolution modal_solution(const ModalCoefficients& coeffs, const std::vector<EigenPair>& pairs,
                             double t) {
    if (t < 0.0) throw std::invalid_argument("modal_solution: t must be >= 0");
    if (pairs.size() != coeffs.lambda.size())
        throw std::invalid_argument("modal_solution: coefficient/pair count mismatch");
    ModalSolution out;
    out.field = Field(pairs.front().vector.grid, 0.0);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        double amp = coeffs.alpha0[k] * std::exp((coeffs.b - coeffs.lambda[k]) * t);
        if (amp == 0.0) continue;
        for (int i = 0; i < out.field.size(); ++i) out.field[i] += amp * pairs[k].vector[i];
    }
    out.remainder_bound = coeffs.n_initial_l2 * std::exp((coeffs.b - coeffs.lambda.back()) * t);
    return out;
}

double rho_spectral(const ModalCoefficients& coeffs, double t) {
    double acc = 0.0;
    for (int k = 0; k < coeffs.modes(); ++k) {
        double growth = coeffs.b - coeffs.lambda[k];
        if (std::abs(growth) < 1e-10) {
            acc += coeffs.alpha0[k] * coeffs.s_overlap[k] * t;  // limit of phi*(e^{gt}-1)
        } else {
            acc += coeffs.phi[k] * std::expm1(growth * t);
        }
    }
    return acc;
}

static double rho_spectral_deriv(const ModalCoefficients& coeffs, double t) {
    double acc = 0.0;
    for (int k = 0; k < coeffs.modes(); ++k) {
        double growth = coeffs.b - coeffs.lambda[k];
        acc += coeffs.alpha0[k] * coeffs.s_overlap[k] * std::exp(growth * t);
    }
    return acc;
}

double time_to_threshold_spectral(const ModalCoefficients& coeffs, double rho0) {
    if (!(rho0 > 0.0)) throw std::invalid_argument("time_to_threshold_spectral: rho0 must be > 0");
    bool reachable = false;
    double limit = 0.0;
    bool limit_finite = true;
    for (int k = 0; k < coeffs.modes(); ++k) {
        double growth = coeffs.b - coeffs.lambda[k];
        double prod = coeffs.alpha0[k] * coeffs.s_overlap[k];
        if (growth > 1e-10 && prod > 0.0) {
            reachable = true;
            limit_finite = false;
        } else if (std::abs(growth) <= 1e-10 && prod > 0.0) {
            reachable = true;  // linear-in-t term
            limit_finite = false;
        } else if (growth < -1e-10) {
            limit += prod / (coeffs.lambda[k] - coeffs.b);
        }
    }
    if (!reachable && limit_finite && limit <= rho0)
        throw UnreachableThreshold("time_to_threshold_spectral: rho(inf)=" + std::to_string(limit) +
                                   " never reaches rho0=" + std::to_string(rho0));

    double hi = 1.0;
    int guard = 0;
    while (rho_spectral(coeffs, hi) < rho0) {
        hi *= 2.0;
        if (++guard > 80)
            throw UnreachableThreshold("time_to_threshold_spectral: no crossing below t=1e24");
    }
    auto f = [&](double t) { return rho_spectral(coeffs, t) - rho0; };
    double t = bisect(f, 0.0, hi, 1e-14, 1e-13);
    for (int it = 0; it < 8; ++it) {  // Newton polish on the monotone series
        double r = f(t);
        if (std::abs(r) <= 1e-12 * rho0) break;
        double dr = rho_spectral_deriv(coeffs, t);
        if (dr <= 0.0) break;
        t -= r / dr;
    }
    return t;
}

std::vector<std::vector<double>> overlap_matrix(const SelectionProfile& s, int K) {
    if (K < 1) throw std::invalid_argument("overlap_matrix: K must be >= 1");
    const auto& e = s.edges();
    const auto& vals = s.values();
    std::vector<std::vector<double>> M(K, std::vector<double>(K, 0.0));
    auto add_interval = [&](double v, double a, double b) {
        // entries of <s v_i, v_k> restricted to [a,b] with s == v there;
        // v_0 = 1, v_k = sqrt(2) cos(k pi x): closed-form cosine integrals.
        auto int_cos = [&](int m) {  // int_a^b cos(m pi x) dx
            return (std::sin(m * kPi * b) - std::sin(m * kPi * a)) / (m * kPi);
        };
        M[0][0] += v * (b - a);
        for (int k = 1; k < K; ++k) {
            double val = v * std::sqrt(2.0) * int_cos(k);
            M[0][k] += val;
            M[k][0] += val;
        }
        for (int i = 1; i < K; ++i) {
            for (int k = i; k < K; ++k) {
                double val;
                if (i == k) {
                    val = v * ((b - a) + int_cos(2 * k));
                } else {
                    val = v * (int_cos(k - i) + int_cos(k + i));
                }
                M[i][k] += val;
                if (i != k) M[k][i] += val;
            }
        }
    };
    for (std::size_t j = 0; j < vals.size(); ++j)
        if (vals[j] != 0.0) add_interval(vals[j], e[j], e[j + 1]);
    return M;
}

namespace {

double phi1(double z) {
    if (std::abs(z) < 1e-4) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    return std::expm1(z) / z;
}

double phi2(double z) {
    if (std::abs(z) < 1e-4) return 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0;
    return (std::expm1(z) - z) / (z * z);
}

} // namespace

std::vector<std::vector<std::vector<double>>> modal_cascade(
    const std::vector<double>& n_initial_modes, const std::vector<std::vector<double>>& M,
    double b, int J, const std::vector<double>& t_grid) {
    const int K = static_cast<int>(n_initial_modes.size());
    const int T = static_cast<int>(t_grid.size());
    if (static_cast<int>(M.size()) != K)
        throw std::invalid_argument("modal_cascade: overlap matrix size mismatch");
    if (T < 2 || t_grid.front() != 0.0)
        throw std::invalid_argument("modal_cascade: t_grid must start at 0");
    if (J < 0) throw std::invalid_argument("modal_cascade: J must be >= 0");

    std::vector<double> lam(K);
    for (int k = 0; k < K; ++k) lam[k] = (k * kPi) * (k * kPi);

    std::vector gamma(J + 1, std::vector(K, std::vector<double>(T, 0.0)));
    for (int k = 0; k < K; ++k)
        for (int ti = 0; ti < T; ++ti)
            gamma[0][k][ti] = n_initial_modes[k] * std::exp(-lam[k] * t_grid[ti]);

    std::vector<std::vector<double>> force(K, std::vector<double>(T, 0.0));
    for (int j = 1; j <= J; ++j) {
        for (int k = 0; k < K; ++k)
            for (int ti = 0; ti < T; ++ti) {
                double f = b * gamma[j - 1][k][ti];
                for (int i = 0; i < K; ++i) f -= M[k][i] * gamma[j - 1][i][ti];
                force[k][ti] = f;
            }
        // gamma_j(0) = 0; exact step for forcing linear between grid points
        for (int k = 0; k < K; ++k) {
            for (int ti = 0; ti + 1 < T; ++ti) {
                double dt = t_grid[ti + 1] - t_grid[ti];
                double z = -lam[k] * dt;
                double g = std::exp(z) * gamma[j][k][ti] +
                           dt * (force[k][ti] * (phi1(z) - phi2(z)) + force[k][ti + 1] * phi2(z));
                gamma[j][k][ti + 1] = g;
            }
        }
    }
    return gamma;
}

} // namespace gcs::spectral
