// Kernel layout: one pass per step over the active window [0, hi+1], where
// hi is the last node with u != 0. Outside that range every flux, source and
// update is exactly zero (b_eps(0) = 0), so skipping those nodes changes no
// bit of the result; the window can grow by at most one node per step
// (3-point stencil). The flux/source nonlinearities are dispatched once per
// evolve into template instantiations so the hot loop stays branch-light
// (p = 3 avoids pow entirely; q = 2 gives b_eps(m^2) = m^2 for every eps).
#include "hjlab/solver.hpp"

#include "hjlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace hjlab {

void RadialGrid::validate() const {
    if (!(r_max > 0.0)) throw domain_error("grid: r_max > 0 required");
    if (n < 3) throw domain_error("grid: n >= 3 required");
}

void SolverConfig::validate() const {
    if (epsilon < 0.0 || epsilon >= 1.0)
        throw domain_error("solver: epsilon must lie in [0, 1)");
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0)
        throw domain_error("solver: cfl_safety must lie in (0, 1]");
}

static double measure_grad_sup(const RadialField& f) {
    const double inv_dr = 1.0 / f.grid.dr();
    double g = 0.0;
    for (size_t i = 0; i + 1 < f.u.size(); ++i)
        g = std::max(g, std::abs(f.u[i + 1] - f.u[i]));
    return g * inv_dr;
}

SolverConfig SolverConfig::resolved(const RadialField& u0) const {
    validate();
    SolverConfig c = *this;
    if (c.support_threshold < 0.0) {
        const double sup0 = *std::max_element(u0.u.begin(), u0.u.end());
        c.support_threshold = 1e-10 * sup0;
    }
    if (c.lipschitz_bound <= 0.0) c.lipschitz_bound = measure_grad_sup(u0);
    return c;
}

Coefficients regularized_coefficients(double s2, double epsilon,
                                      const Params& params) {
    params.validate();
    if (s2 < 0.0) throw domain_error("regularized_coefficients: s2 >= 0 required");
    const double e2 = epsilon * epsilon;
    Coefficients c{};
    c.a = std::pow(s2 + e2, 0.5 * (params.p - 2.0));
    c.b = std::pow(s2 + e2, 0.5 * params.q) - std::pow(epsilon, params.q);
    if (c.b < 0.0) c.b = 0.0; // clamp rounding at s2 = 0
    return c;
}

double max_diffusivity(double G, double epsilon, const Params& params) {
    // The effective diffusivity D(s) = ((p-1)s^2 + eps^2)(s^2 + eps^2)^{(p-4)/2}
    // is increasing on [0, inf) for p > 2, so the max over [0, G] sits at G.
    const double e2 = epsilon * epsilon;
    const double s2 = G * G;
    if (s2 + e2 == 0.0) return 0.0;
    return ((params.p - 1.0) * s2 + e2) * std::pow(s2 + e2, 0.5 * (params.p - 4.0));
}

static double stable_dt_impl(double dr, double G, const SolverConfig& config,
                             const Params& params) {
    if (!(dr > 0.0)) throw domain_error("stable_dt: degenerate grid (dr <= 0)");
    const double Dmax = max_diffusivity(G, config.epsilon, params);
    const double diffusive =
        Dmax > 0.0 ? dr * dr / (2.0 * params.N * Dmax)
                   : std::numeric_limits<double>::infinity();
    if (config.pure_diffusion) {
        return config.cfl_safety * std::min(diffusive, 1e300);
    }
    const double e2 = config.epsilon * config.epsilon;
    const double speed = params.q * std::pow(G * G + e2, 0.5 * (params.q - 1.0)) *
                             std::pow(G, std::max(params.q - 2.0, 0.0)) +
                         1e-300;
    return config.cfl_safety * std::min(diffusive, dr / speed);
}

double stable_dt(const RadialField& field, const SolverConfig& config,
                 const Params& params) {
    params.validate();
    config.validate();
    const double G = config.lipschitz_bound > 0.0 ? config.lipschitz_bound
                                                  : measure_grad_sup(field);
    return stable_dt_impl(field.grid.dr(), G, config, params);
}

std::vector<double> radial_l1_weights(const RadialGrid& grid, int N) {
    const double omega = sphere_surface_measure(N);
    const double dr = grid.dr();
    std::vector<double> w(grid.n);
    for (int i = 0; i < grid.n; ++i) {
        const double metric = N == 1 ? 1.0 : std::pow(grid.node(i), N - 1);
        w[i] = omega * metric * dr;
    }
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

namespace {

// --- flux phi(g) = a_eps(g^2) g ------------------------------------------
struct FluxP3Zero { // p = 3, eps = 0
    double operator()(double g) const { return std::abs(g) * g; }
};
struct FluxP3Eps { // p = 3
    double e2;
    double operator()(double g) const { return std::sqrt(g * g + e2) * g; }
};
struct FluxGeneral {
    double e2, half_pm2;
    double operator()(double g) const {
        return std::pow(g * g + e2, half_pm2) * g;
    }
};

// --- source b_eps(m^2), m >= 0 -------------------------------------------
struct SourceOff {
    double operator()(double) const { return 0.0; }
};
struct SourceQ2 { // q = 2: (m^2 + e^2) - e^2 = m^2 for every eps
    double operator()(double m) const { return m * m; }
};
struct SourceGeneralZero { // eps = 0
    double q;
    double operator()(double m) const { return std::pow(m, q); }
};
struct SourceGeneralEps {
    double e2, half_q, eq;
    double operator()(double m) const {
        return std::pow(m * m + e2, half_q) - eq;
    }
};

struct StepAccounting {
    double weighted_source = 0.0; // Sum_i w_i b_eps(m_i^2) over the window
};

// One explicit update on nodes [0, imax] (imax <= n-2). Metric factors
// metric_plus/minus are (r_{i+1/2}/r_i)^{N-1}/dr and (r_{i-1/2}/r_i)^{N-1}/dr
// (null for N = 1, where both reduce to 1/dr). w are the L1 quadrature
// weights used by the balance accumulator.
template <class Flux, class Source>
StepAccounting apply_step(const double* u, double* un, int imax, double inv_dr,
                          double dt, int N, const double* metric_plus,
                          const double* metric_minus, const double* w,
                          Flux flux, Source source) {
    StepAccounting acc;
    double g_prev = (u[1] - u[0]) * inv_dr; // g_{1/2}
    double phi_prev = flux(g_prev);
    {
        const double m0 = g_prev > 0.0 ? g_prev : 0.0; // backward diff is -g
        const double s0 = source(m0);
        un[0] = u[0] + dt * (2.0 * N * phi_prev * inv_dr + s0);
        acc.weighted_source += w[0] * s0;
    }
    for (int i = 1; i <= imax; ++i) {
        const double g = (u[i + 1] - u[i]) * inv_dr; // g_{i+1/2}
        const double phi = flux(g);
        double diff;
        if (metric_plus) {
            diff = metric_plus[i] * phi - metric_minus[i] * phi_prev;
        } else {
            diff = (phi - phi_prev) * inv_dr;
        }
        // Godunov modulus with a = g_prev (backward), b = g (forward)
        double m;
        if (g_prev <= g) {
            m = std::max(std::abs(g_prev), std::abs(g));
        } else if (g <= 0.0 && 0.0 <= g_prev) {
            m = 0.0;
        } else {
            m = std::min(std::abs(g_prev), std::abs(g));
        }
        const double s = source(m);
        un[i] = u[i] + dt * (diff + s);
        acc.weighted_source += w[i] * s;
        g_prev = g;
        phi_prev = phi;
    }
    return acc;
}

struct KernelConfig {
    double e2 = 0.0;
    double eq = 0.0;
    double half_pm2 = 0.5;
    double half_q = 1.0;
    bool p_is_3 = false;
    bool q_is_2 = false;
    bool eps_zero = true;
    bool pure_diffusion = false;
    double q = 2.0;
};

template <class Flux>
StepAccounting dispatch_source(const KernelConfig& kc, const double* u, double* un,
                               int imax, double inv_dr, double dt, int N,
                               const double* mp, const double* mm,
                               const double* w, Flux flux) {
    if (kc.pure_diffusion)
        return apply_step(u, un, imax, inv_dr, dt, N, mp, mm, w, flux, SourceOff{});
    if (kc.q_is_2)
        return apply_step(u, un, imax, inv_dr, dt, N, mp, mm, w, flux, SourceQ2{});
    if (kc.eps_zero)
        return apply_step(u, un, imax, inv_dr, dt, N, mp, mm, w, flux,
                          SourceGeneralZero{kc.q});
    return apply_step(u, un, imax, inv_dr, dt, N, mp, mm, w, flux,
                      SourceGeneralEps{kc.e2, kc.half_q, kc.eq});
}

StepAccounting dispatch_step(const KernelConfig& kc, const double* u, double* un,
                             int imax, double inv_dr, double dt, int N,
                             const double* mp, const double* mm, const double* w) {
    if (kc.p_is_3 && kc.eps_zero)
        return dispatch_source(kc, u, un, imax, inv_dr, dt, N, mp, mm, w,
                               FluxP3Zero{});
    if (kc.p_is_3)
        return dispatch_source(kc, u, un, imax, inv_dr, dt, N, mp, mm, w,
                               FluxP3Eps{kc.e2});
    return dispatch_source(kc, u, un, imax, inv_dr, dt, N, mp, mm, w,
                           FluxGeneral{kc.e2, kc.half_pm2});
}

KernelConfig make_kernel_config(const SolverConfig& config, const Params& params) {
    KernelConfig kc;
    kc.e2 = config.epsilon * config.epsilon;
    kc.eq = std::pow(config.epsilon, params.q);
    kc.half_pm2 = 0.5 * (params.p - 2.0);
    kc.half_q = 0.5 * params.q;
    kc.p_is_3 = params.p == 3.0;
    kc.q_is_2 = params.q == 2.0;
    kc.eps_zero = config.epsilon == 0.0;
    kc.pure_diffusion = config.pure_diffusion;
    kc.q = params.q;
    return kc;
}

struct MetricArrays {
    std::vector<double> plus, minus; // empty for N = 1
    const double* plus_ptr() const { return plus.empty() ? nullptr : plus.data(); }
    const double* minus_ptr() const { return minus.empty() ? nullptr : minus.data(); }
};

MetricArrays metric_arrays(const RadialGrid& grid, int N) {
    MetricArrays m;
    if (N == 1) return m;
    const double dr = grid.dr();
    m.plus.assign(grid.n, 0.0);
    m.minus.assign(grid.n, 0.0);
    for (int i = 1; i < grid.n; ++i) {
        const double ri = grid.node(i);
        m.plus[i] = std::pow((ri + 0.5 * dr) / ri, N - 1) / dr;
        m.minus[i] = std::pow((ri - 0.5 * dr) / ri, N - 1) / dr;
    }
    return m;
}

void validate_field(const RadialField& f) {
    f.grid.validate();
    if (static_cast<int>(f.u.size()) != f.grid.n)
        throw domain_error("field: value array does not match the grid");
    for (double v : f.u)
        if (!std::isfinite(v)) throw numerical_error("field: non-finite value");
}

int last_nonzero(const std::vector<double>& u) {
    for (int i = static_cast<int>(u.size()) - 1; i >= 0; --i)
        if (u[i] != 0.0) return i;
    return -1;
}

} // namespace

RadialField step(const RadialField& field, double dt, const SolverConfig& config,
                 const Params& params) {
    params.validate();
    validate_field(field);
    const SolverConfig rc = config.resolved(field);
    const double bound = stable_dt(field, rc, params);
    if (dt > bound * (1.0 + 1e-12))
        throw domain_error("step: dt " + std::to_string(dt) +
                           " exceeds the CFL-stable bound " + std::to_string(bound));
    const KernelConfig kc = make_kernel_config(rc, params);
    const auto w = radial_l1_weights(field.grid, params.N);
    const auto metrics = metric_arrays(field.grid, params.N);

    RadialField out = field;
    out.t = field.t + dt;
    const int imax = field.grid.n - 2;
    dispatch_step(kc, field.u.data(), out.u.data(), imax, 1.0 / field.grid.dr(),
                  dt, params.N, metrics.plus_ptr(), metrics.minus_ptr(), w.data());
    for (double v : out.u)
        if (!std::isfinite(v))
            throw numerical_error("step: non-finite value produced (NaN guard)");
    return out;
}

EvolveResult evolve(const RadialField& u0, double T, const SolverConfig& config,
                    const Params& params, const std::vector<double>& snapshot_times) {
    params.validate();
    validate_field(u0);
    if (!(T >= 0.0)) throw domain_error("evolve: T >= 0 required");
    for (size_t i = 0; i < snapshot_times.size(); ++i) {
        const double s = snapshot_times[i];
        if (s < 0.0 || s > T * (1.0 + 1e-12))
            throw domain_error("evolve: snapshot times must lie in [0, T]");
        if (i > 0 && s <= snapshot_times[i - 1])
            throw domain_error("evolve: snapshot times must be strictly increasing");
    }
    const SolverConfig rc = config.resolved(u0);
    const KernelConfig kc = make_kernel_config(rc, params);
    const auto w = radial_l1_weights(u0.grid, params.N);
    const auto metrics = metric_arrays(u0.grid, params.N);
    const int n = u0.grid.n;
    const double dr = u0.grid.dr();
    const double inv_dr = 1.0 / dr;

    EvolveResult res;
    double G = rc.lipschitz_bound;
    double dt_cfl = stable_dt_impl(dr, G, rc, params);
    res.dt_initial = dt_cfl;

    std::vector<double> u = u0.u;
    std::vector<double> un(u.size());
    double t = 0.0;
    double source_integral = 0.0;
    int hi = last_nonzero(u);
    bool warned_domain = false;
    size_t si = 0;

    auto emit = [&](double at) {
        RadialField f{u0.grid, at, u};
        res.series.push_back(field_stats(f, params, rc));
        res.snapshots.push_back(std::move(f));
        res.source_integral.push_back(source_integral);
    };

    while (si < snapshot_times.size() && snapshot_times[si] <= 0.0) {
        emit(0.0);
        ++si;
    }

    const double t_end = T;
    while (t < t_end) {
        if (res.steps % 100 == 0) {
            // re-measure the Lipschitz bound over the active window; it never
            // increases, so the CFL step can only grow
            double g = 0.0;
            const int lim = std::min(hi + 1, n - 1);
            for (int i = 0; i < lim; ++i)
                g = std::max(g, std::abs(u[i + 1] - u[i]));
            g *= inv_dr;
            if (!std::isfinite(g))
                throw numerical_error("evolve: non-finite gradient at t = " +
                                      std::to_string(t) + " (NaN guard)");
            if (g < G) {
                G = g;
                dt_cfl = stable_dt_impl(dr, G, rc, params);
            }
            while (hi > 0 && u[hi] == 0.0) --hi;
        }
        double dt = dt_cfl;
        double land = -1.0;
        if (si < snapshot_times.size() && t + dt >= snapshot_times[si]) {
            land = snapshot_times[si];
            dt = land - t;
        } else if (t + dt >= t_end) {
            land = t_end;
            dt = land - t;
        }
        const int imax = std::min(hi + 1, n - 2);
        if (dt > 0.0) {
            const StepAccounting acc =
                dispatch_step(kc, u.data(), un.data(), imax, inv_dr, dt, params.N,
                              metrics.plus_ptr(), metrics.minus_ptr(), w.data());
            std::memcpy(u.data(), un.data(), (imax + 1) * sizeof(double));
            source_integral += dt * acc.weighted_source;
        }
        ++res.steps;
        if (hi < n - 1 && u[hi + 1] != 0.0) ++hi;
        if (hi >= n - 2 && !warned_domain) {
            res.warnings.push_back(
                "domain too small: support reached the penultimate node");
            warned_domain = true;
        }
        t = land >= 0.0 ? land : t + dt;
        if (land >= 0.0 && si < snapshot_times.size() && land == snapshot_times[si]) {
            emit(land);
            ++si;
        }
    }
    return res;
}

} // namespace hjlab
