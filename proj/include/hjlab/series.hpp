// Per-snapshot scalar statistics of a radial field.
#pragma once

#include <vector>

namespace hjlab {

struct SeriesRecord {
    double t;
    double sup_norm;       // max_i u_i
    double grad_sup;       // max one-sided difference magnitude
    double l1_norm;        // trapezoid quadrature with weight omega_N r^{N-1}
    double min_plap;       // min over interior nodes of the discrete
                           // divergence of the flux a_eps(g^2) g
    double support_radius; // largest r_i with u_i > support threshold
};

using TimeSeries = std::vector<SeriesRecord>;

} // namespace hjlab
