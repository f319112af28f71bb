// Variational evaluation of the first-order flow obtained by dropping the
// diffusion term in self-similar variables:
//   h(tau, y) = sup_z { h0(z) - gamma_q |y - z e^{-tau}|^{q/(q-1)}
//                                (1 - e^{-q tau})^{-1/(q-1)} }_+
// The sup is exhaustive over the sampled support of h0, then refined by
// golden-section search on the piecewise-linear interpolant.
#pragma once

#include "hjlab/params.hpp"

#include <vector>

namespace hjlab {

struct SampledInitialData {
    // Sample nodes, uniformly spaced and sorted ascending. A radial sample
    // starts at 0; a line sample may include negative positions.
    std::vector<double> nodes;
    std::vector<double> values; // >= 0, compactly supported
    double support_radius = 0.0;

    static SampledInitialData from_values(std::vector<double> nodes,
                                          std::vector<double> values);
};

struct HopfLaxResult {
    std::vector<double> values;
    int refinement_stalls = 0; // queries where local refinement lost to the
                               // grid scan (grid value kept)
};

// Evaluates h(tau, .) at each query point. Radial data (all nodes >= 0) are
// treated as even in z; the optimal competitor for y >= 0 then lies on the
// non-negative semi-axis, which the search scans. Requires tau > 0.
HopfLaxResult hopf_lax_evolve(const SampledInitialData& h0, double tau,
                              const std::vector<double>& query_points,
                              const Params& params);

// True iff every sampled value at |position| >= Y is <= beta.
// Requires Y within the grid extent.
bool tail_smallness(const std::vector<double>& positions,
                    const std::vector<double>& values, double Y, double beta);

} // namespace hjlab
