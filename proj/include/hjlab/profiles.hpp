// Closed-form solution profiles:
//   h_infty(t, r; M) = (M - gamma_q (r/t^{1/q})^{q/(q-1)})_+   (self-similar limit)
//   h_s(r; M)        = h_infty(1, r; M)                         (steady profile)
//   B_L(t, r)        = Barenblatt source solution of mass L for du/dt = div(|Du|^{p-2}Du)
//   traveling wave f with tail integral F and front offset mu, from the
//   implicit quadrature  (p-1) Int_0^{f(y)} z^{p-3}/(1-z^{q-1}) dz = (-y)_+.
#pragma once

#include "hjlab/params.hpp"

#include <vector>

namespace hjlab {

// (M - gamma_q (r/t^{1/q})^{q/(q-1)})_+ ; requires t > 0, M >= 0, r >= 0.
double eval_h_infty(double t, double r, double M, const Params& params);

// Steady profile h_s(r; M) = eval_h_infty(1, r, M, params).
double eval_h_s(double r, double M, const Params& params);

// Barenblatt solution of the pure p-Laplacian flow with radial mass L:
//   t^{-alpha} ( A(L) - k (r t^{-beta})^{p/(p-1)} )_+^{(p-1)/(p-2)}
// with k fixed by the PDE and A(L) fixed by the mass constraint.
double eval_barenblatt(double t, double r, double L, const Params& params);

// Profile constants of eval_barenblatt: k and the amplitude A(L).
struct BarenblattConstants {
    double k;
    double A;
};
BarenblattConstants barenblatt_constants(double L, const Params& params);

struct TravelingWave {
    Params params;
    std::vector<double> y_nodes;  // ascending; negative part geometrically
                                  // refined toward the front at y = 0
    std::vector<double> f_values; // profile values in [0, 1)
    std::vector<double> F_values; // tail integral F(y) = Int_y^inf f
};

// Tabulates the wave profile on [y_min, 0] (plus a few nodes beyond the front
// where f = F = 0). Each f(y_i) solves the implicit equation to residual
// <= tol. Requires 1 < q < p and y_min < 0.
TravelingWave traveling_wave(const Params& params, double y_min, int n_nodes,
                             double tol = 1e-10);

// Evaluates the tabulated profile / tail integral at arbitrary y (piecewise
// linear between nodes, exact 0 for y >= 0, error beyond y_min).
double wave_f(const TravelingWave& tw, double y);
double wave_F(const TravelingWave& tw, double y);

// Unique mu < 0 with F(R0 + mu) = M, located by bisection on the tabulated
// monotone F. The induced support bound is radius(t) <= max{R0, t - mu}.
// Throws domain_error if M exceeds F(y_min) (tabulation too short).
double wave_offset_mu(const TravelingWave& tw, double R0, double M);

} // namespace hjlab
