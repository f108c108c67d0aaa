#pragma once

#include <functional>
#include <utility>
#include <vector>

// Small numerical utilities shared by the solver modules: Gauss-Legendre
// quadrature, bracketing root refinement, and a least-squares slope fit.

namespace gcs {

struct GaussLegendre {
    std::vector<double> nodes;    // on [-1,1]
    std::vector<double> weights;
    explicit GaussLegendre(int n);

    /// Integrate f over [a,b] with `panels` equal panels.
    double integrate(const std::function<double(double)>& f, double a, double b,
                     int panels = 1) const;
};

/// Bisection on a sign change; requires f(lo)*f(hi) <= 0.  Stops when the
/// bracket width is below abs_tol + rel_tol*|mid|.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double abs_tol = 1e-14, double rel_tol = 1e-13);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// exp(x)-1 over x, stable near 0.
double expm1_over_x(double x);

} // namespace gcs
