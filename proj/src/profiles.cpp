// The traveling-wave profile f is defined implicitly by
//   (p-1) J(p-3, f(y)) = (-y)_+ ,   J(k, x) = Int_0^x z^k / (1 - z^{q-1}) dz.
// The substitution w = 1 - z^{q-1} (s = 1 - w) turns J into
//   J(k, x) = 1/(q-1) Int_0^{x^{q-1}} s^E / (1-s) ds,  E = (k+2-q)/(q-1) > -1,
// which splits into a geometric-series part on [0, 1/2] (exact to machine
// precision) and, when x^{q-1} > 1/2, an adaptive quadrature on the rest;
// only the latter sees the z -> 1 pole. The tail integral follows from the
// same kernel: F(y) = Int_y^inf f = (p-1) J(p-2, f(y)), since dF/dy = -f.
#include "hjlab/profiles.hpp"

#include "hjlab/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace hjlab {

double eval_h_infty(double t, double r, double M, const Params& params) {
    params.validate_subcritical();
    if (!(t > 0.0)) throw domain_error("eval_h_infty: t > 0 required");
    if (M < 0.0) throw domain_error("eval_h_infty: M >= 0 required");
    const double q = params.q;
    const double gamma_q = (q - 1.0) * std::pow(q, -q / (q - 1.0));
    const double xi = std::abs(r) / std::pow(t, 1.0 / q);
    const double val = M - gamma_q * std::pow(xi, q / (q - 1.0));
    return val > 0.0 ? val : 0.0;
}

double eval_h_s(double r, double M, const Params& params) {
    return eval_h_infty(1.0, r, M, params);
}

BarenblattConstants barenblatt_constants(double L, const Params& params) {
    params.validate();
    if (!(L > 0.0)) throw domain_error("eval_barenblatt: L > 0 required");
    const double p = params.p;
    const double N = params.N;
    const double beta = 1.0 / (N * (p - 2.0) + p);
    const double k = ((p - 2.0) / p) * std::pow(beta, 1.0 / (p - 1.0));
    // Mass of the profile (A - k |xi|^{p/(p-1)})_+^{(p-1)/(p-2)}:
    //   omega_N k^{-N(p-1)/p} A^{N(p-1)/p + (p-1)/(p-2)} (p-1)/p B(N(p-1)/p, (2p-3)/(p-2))
    const double a1 = N * (p - 1.0) / p;
    const double m = (p - 1.0) / (p - 2.0);
    const double I = ((p - 1.0) / p) * beta_function(a1, m + 1.0);
    const double c = sphere_surface_measure(params.N) * std::pow(k, -a1) * I;
    BarenblattConstants bc{};
    bc.k = k;
    bc.A = std::pow(L / c, 1.0 / (a1 + m));
    return bc;
}

double eval_barenblatt(double t, double r, double L, const Params& params) {
    params.validate();
    if (!(t > 0.0)) throw domain_error("eval_barenblatt: t > 0 required");
    const auto bc = barenblatt_constants(L, params);
    const double p = params.p;
    const double N = params.N;
    const double beta = 1.0 / (N * (p - 2.0) + p);
    const double alpha = N * beta;
    const double xi = std::abs(r) * std::pow(t, -beta);
    const double core = bc.A - bc.k * std::pow(xi, p / (p - 1.0));
    if (core <= 0.0) return 0.0;
    return std::pow(t, -alpha) * std::pow(core, (p - 1.0) / (p - 2.0));
}

namespace {

// Int_0^c s^E / (1-s) ds for 0 <= c <= 1/2, E > -1, by term-wise integration
// of the geometric series: sum_j c^{E+1+j} / (E+1+j).
double series_part(double E, double c, double tol) {
    if (c <= 0.0) return 0.0;
    double power = std::pow(c, E + 1.0);
    double sum = 0.0;
    for (int j = 0; j < 400; ++j) {
        const double term = power / (E + 1.0 + j);
        sum += term;
        if (term < tol * 0.01 && j > 2) return sum;
        power *= c;
    }
    throw numerical_error("traveling wave quadrature: series part stalled");
}

// J(k, x) = Int_0^x z^k / (1 - z^{q-1}) dz for x in [0, 1).
double wave_integral(double k, double x, double q, double tol) {
    if (x <= 0.0) return 0.0;
    const double E = (k + 2.0 - q) / (q - 1.0);
    const double X = std::pow(x, q - 1.0);
    double val = series_part(E, std::min(X, 0.5), tol * (q - 1.0));
    if (X > 0.5) {
        // Split off the pole: s^E/(1-s) = (s^E-1)/(1-s) + 1/(1-s). The first
        // part extends smoothly through s = 1 (limit -E), so the adaptive
        // quadrature stays cheap however close X is to the pole; the second
        // integrates to a logarithm in closed form.
        const double one_minus_X = 1.0 - X;
        if (!(one_minus_X > 0.0))
            throw numerical_error("traveling wave quadrature: argument at the pole");
        val += std::log(0.5 / one_minus_X);
        if (E != 0.0) {
            val += adaptive_simpson(
                [E](double s) {
                    const double d = 1.0 - s;
                    return d > 0.0 ? std::expm1(E * std::log(s)) / d : -E;
                },
                0.5, X, tol * (q - 1.0) * 0.1);
        }
    }
    return val / (q - 1.0);
}

} // namespace

TravelingWave traveling_wave(const Params& params, double y_min, int n_nodes,
                             double tol) {
    params.validate();
    if (!(params.q < params.p))
        throw domain_error("traveling_wave: requires q < p");
    if (!(y_min < 0.0)) throw domain_error("traveling_wave: y_min < 0 required");
    if (n_nodes < 3) throw domain_error("traveling_wave: n_nodes >= 3 required");
    if (!(tol > 0.0)) throw domain_error("traveling_wave: tol > 0 required");

    const double p = params.p, q = params.q;

    TravelingWave tw;
    tw.params = params;

    // Geometric node spacing, finest at the front y = 0 where f has its kink;
    // gap ratio spans ~50x across the tabulation.
    const double span = -y_min;
    const double rho = std::exp(std::log(50.0) / std::max(1, n_nodes - 2));
    const double g0 = span * (rho - 1.0) / (std::pow(rho, n_nodes - 1) - 1.0);
    std::vector<double> neg(n_nodes);
    neg[0] = 0.0;
    double gap = g0, acc = 0.0;
    for (int i = 1; i < n_nodes; ++i) {
        acc += gap;
        gap *= rho;
        neg[i] = -acc;
    }
    neg.back() = y_min;
    tw.y_nodes.assign(neg.rbegin(), neg.rend());
    tw.y_nodes.push_back(0.05 * span);
    tw.y_nodes.push_back(0.10 * span);

    const int total = static_cast<int>(tw.y_nodes.size());
    tw.f_values.assign(total, 0.0);
    tw.F_values.assign(total, 0.0);

    // Solve the implicit equation node by node, walking from the front to
    // y_min; f is increasing toward 1 as y decreases, so the previous value
    // seeds the bracket.
    double x_lo = 0.0;
    for (int i = n_nodes - 1; i >= 0; --i) {
        const double y = tw.y_nodes[i];
        if (y >= 0.0) continue;
        const double target = -y;
        auto residual = [&](double x) {
            return (p - 1.0) * wave_integral(p - 3.0, x, q, tol) - target;
        };
        // expand the upper bracket toward the pole at x = 1
        double x_hi = std::min(1.0 - 1e-16, std::max(0.5, x_lo + 0.25));
        double r_hi = residual(x_hi);
        for (int j = 0; r_hi < 0.0 && j < 60; ++j) {
            x_hi = 1.0 - 0.5 * (1.0 - x_hi);
            if (1.0 - x_hi < 1e-15)
                throw numerical_error("traveling_wave: profile too close to 1; "
                                      "y_min too deep for double precision");
            r_hi = residual(x_hi);
        }
        if (r_hi < 0.0)
            throw numerical_error("traveling_wave: failed to bracket the profile value");
        double lo = x_lo, hi = x_hi;
        double r_lo = residual(lo);
        double x_mid = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            x_mid = 0.5 * (lo + hi);
            const double r_mid = residual(x_mid);
            if (std::abs(r_mid) <= 0.5 * tol) break;
            if ((r_mid > 0.0) == (r_hi > 0.0)) {
                hi = x_mid;
            } else {
                lo = x_mid; r_lo = r_mid;
            }
            if (hi - lo < 1e-17) break;
        }
        (void)r_lo;
        tw.f_values[i] = x_mid;
        tw.F_values[i] = (p - 1.0) * wave_integral(p - 2.0, x_mid, q, tol);
        x_lo = x_mid;
    }
    return tw;
}

double wave_f(const TravelingWave& tw, double y) {
    if (y >= 0.0) return 0.0;
    if (y < tw.y_nodes.front())
        throw domain_error("wave_f: y below the tabulated range");
    return lerp_sorted(tw.y_nodes, tw.f_values, y);
}

double wave_F(const TravelingWave& tw, double y) {
    if (y >= 0.0) return 0.0;
    if (y < tw.y_nodes.front())
        throw domain_error("wave_F: y below the tabulated range");
    return lerp_sorted(tw.y_nodes, tw.F_values, y);
}

double wave_offset_mu(const TravelingWave& tw, double R0, double M) {
    if (!(R0 > 0.0)) throw domain_error("wave_offset_mu: R0 > 0 required");
    if (!(M > 0.0)) throw domain_error("wave_offset_mu: M > 0 required");
    const double F_max = tw.F_values.front();
    if (M > F_max)
        throw domain_error("wave_offset_mu: M exceeds F(y_min); extend the tabulation");
    // Bisection for F(s) = M on the strictly monotone negative part.
    double lo = tw.y_nodes.front(), hi = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + std::abs(lo)); ++it) {
        const double mid = 0.5 * (lo + hi);
        const double Fm = lerp_sorted(tw.y_nodes, tw.F_values, mid);
        if (Fm > M) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double s = 0.5 * (lo + hi);
    return s - R0;
}

} // namespace hjlab
