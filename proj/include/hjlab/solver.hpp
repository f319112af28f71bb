// Explicit monotone finite-difference integrator, radial symmetry, for
//   du/dt = div(a_eps(|Du|^2) Du) + b_eps(|Du|^2)
//   a_eps(r) = (r + eps^2)^{(p-2)/2},  b_eps(r) = (r + eps^2)^{q/2} - eps^q.
// Diffusion: conservative finite volume with half-node fluxes and the metric
// factor r^{N-1}; symmetric ghost at the origin; far-field Dirichlet zero.
// Source: Godunov numerical Hamiltonian for the concave H(xi) = -|xi|^q,
// which vanishes at discrete maxima, so [0, max u0] is exactly invariant.
#pragma once

#include "hjlab/params.hpp"
#include "hjlab/series.hpp"

#include <string>
#include <vector>

namespace hjlab {

struct RadialGrid {
    double r_max = 1.0;
    int n = 3; // nodes r_i = i * dr, i = 0 .. n-1

    double dr() const { return r_max / (n - 1); }
    double node(int i) const { return i * dr(); }
    void validate() const; // r_max > 0, n >= 3
};

struct RadialField {
    RadialGrid grid;
    double t = 0.0;
    std::vector<double> u;
};

struct SolverConfig {
    double epsilon = 0.0;         // regularization, in [0, 1)
    double cfl_safety = 0.9;      // in (0, 1]
    bool pure_diffusion = false;  // drop the source term
    double support_threshold = -1.0; // < 0: auto, resolves to 1e-10 * ||u0||inf
    double lipschitz_bound = -1.0;   // <= 0: auto, resolves to measured ||Du0||inf

    void validate() const;
    // Copy with support_threshold / lipschitz_bound resolved against u0.
    SolverConfig resolved(const RadialField& u0) const;
};

struct Coefficients {
    double a; // flux modulus a_eps(s2)
    double b; // source b_eps(s2) >= 0
};
Coefficients regularized_coefficients(double s2, double epsilon,
                                      const Params& params);

// CFL-stable time step:
//   dt = cfl * min{ dr^2 / (2 N D_max),
//                   dr / (q (G^2+eps^2)^{(q-1)/2} G^{max(q-2,0)} + 1e-300) }
// where G is the Lipschitz bound and D_max = max_{s in [0,G]} of the
// effective diffusivity ((p-1)s^2 + eps^2)(s^2 + eps^2)^{(p-4)/2}, which is
// attained at s = G (the diffusivity is increasing for p > 2).
// In pure_diffusion mode only the diffusive bound applies.
double stable_dt(const RadialField& field, const SolverConfig& config,
                 const Params& params);

// Effective diffusivity maximum over [0, G]; exposed for validation.
double max_diffusivity(double G, double epsilon, const Params& params);

// Trapezoid quadrature weights omega_N r^{N-1} dr (half at both ends); used
// for the L1 norm and the mass-balance accumulator, so both see the same
// discrete measure.
std::vector<double> radial_l1_weights(const RadialGrid& grid, int N);

// One explicit Euler step of size dt. Throws domain_error if dt exceeds
// stable_dt, numerical_error if non-finite values appear.
RadialField step(const RadialField& field, double dt, const SolverConfig& config,
                 const Params& params);

struct EvolveResult {
    std::vector<RadialField> snapshots;
    TimeSeries series;
    // Cumulative source integral Sum_steps dt Sum_i w_i b_eps(m_i^2) at each
    // snapshot (the right-hand side of the discrete mass balance).
    std::vector<double> source_integral;
    std::vector<std::string> warnings;
    long long steps = 0;
    double dt_initial = 0.0;
};

// Integrates u0 to time T, landing exactly on each snapshot time by clipping
// dt. The Lipschitz bound used by the CFL formula starts from the measured
// one, is re-measured every 100 steps, and never increased. Emits a
// domain-too-small warning if the support reaches the penultimate node.
EvolveResult evolve(const RadialField& u0, double T, const SolverConfig& config,
                    const Params& params, const std::vector<double>& snapshot_times);

} // namespace hjlab
