// Small numerical toolbox: adaptive quadrature, bracketed root finding,
// golden-section maximization, linear interpolation, least squares on two
// basis functions. Everything is deterministic (no RNG, no parallelism).
#pragma once

#include <functional>
#include <vector>

namespace hjlab {

// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
// Throws numerical_error if the recursion cannot converge (depth > 60).
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol);

// Root of f on a bracketing interval [a, b] with f(a), f(b) of opposite sign,
// by bisection with secant acceleration, to |interval| <= tol.
double find_root(const std::function<double(double)>& f, double a, double b,
                 double tol);

// Location of the maximum of unimodal f on [a, b] by golden-section search;
// runs max_iter contractions (61 contractions shrink by ~1e-13).
double golden_max(const std::function<double(double)>& f, double a, double b,
                  int max_iter = 61);

// Piecewise-linear interpolation of (x_i, v_i) with x uniform: x_i = x0 + i*dx.
// Clamps to the end values outside the range.
double lerp_uniform(double x0, double dx, const std::vector<double>& v, double x);

// Piecewise-linear interpolation on a sorted, not necessarily uniform, grid.
double lerp_sorted(const std::vector<double>& x, const std::vector<double>& v,
                   double xq);

// Least squares fit of data ~ c0 * ones + c1 * basis; returns {c0, c1, rms}.
struct Fit2 {
    double c0;
    double c1;
    double rms;
};
Fit2 fit_const_plus_basis(const std::vector<double>& basis,
                          const std::vector<double>& data);

// Least squares slope of data vs abscissa (both already transformed, e.g. logs).
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

// Euler beta function B(a, b) via lgamma.
double beta_function(double a, double b);

} // namespace hjlab
