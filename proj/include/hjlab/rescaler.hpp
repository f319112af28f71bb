// Self-similar frame: tau = log(1+t)/q, y = x/(1+t)^{1/q}. Values are
// unchanged by the transform, so v(tau, y) = u(t, y (1+t)^{1/q}); the
// long-time claim under test is v(tau) -> h_s(.; M_infty) uniformly.
#pragma once

#include "hjlab/params.hpp"
#include "hjlab/series.hpp"
#include "hjlab/solver.hpp"

#include <vector>

namespace hjlab {

struct RescaledField {
    double tau = 0.0;
    std::vector<double> y_nodes;
    std::vector<double> v;
};

struct MassEstimate {
    double M_est = 0.0;
    bool decayed_to_zero = false;
    double fit_residual = 0.0; // rms of the winning fit
    double fit_gamma = 0.0;    // exponent of the winning fit
};

struct ConvergenceReport {
    MassEstimate mass;
    std::vector<std::pair<double, double>> errors_by_tau; // (tau, sup error)
};

// Interpolates the field onto target_y_grid in the rescaled frame
// (piecewise linear; zero outside the source domain).
RescaledField to_selfsimilar(const RadialField& field, const Params& params,
                             const std::vector<double>& target_y_grid);

// Fits sup_norm(t) = M_est + c t^{-gamma} over the last tail_fraction of
// positive-time snapshots, for gamma in {1/2, 1, (p-q)/(2q-p)} (the third
// only when 2q > p), and keeps the smallest-residual fit. decayed_to_zero is
// set when M_est < 1e-3 * sup_norm at the first snapshot. Requires >= 4
// snapshots.
MassEstimate estimate_M_infty(const TimeSeries& series, double tail_fraction,
                              const Params& params);

// max over nodes of |v(y) - h_s(|y|; M)|.
double profile_error(const RescaledField& v, double M, const Params& params);

} // namespace hjlab
