// Exponent pair (p, q) and dimension N for the equation
//   du/dt = div(|Du|^{p-2} Du) + |Du|^q,   p > 2, q > 1,
// plus every constant derived from them:
//   gamma_q = (q-1) q^{-q/(q-1)}            (steady-profile curvature)
//   q_star  = p - N/(N+1)                   (critical source exponent)
//   alpha   = N/(N(p-2)+p), beta = alpha/N  (source-solution exponents)
#pragma once

#include <stdexcept>
#include <string>

namespace hjlab {

// Error taxonomy used across the library; the CLI maps these to exit codes.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct Params {
    double p = 3.0;
    double q = 2.0;
    int N = 1;

    // Throws domain_error unless p > 2, q > 1, N >= 1.
    void validate() const;
    // Additionally require q < p (profile evaluators tied to the long-time
    // theory reject q >= p).
    void validate_subcritical() const;
};

struct DerivedConstants {
    double gamma_q;               // (q-1) q^{-q/(q-1)}
    double q_star;                // p - N/(N+1)
    double alpha;                 // N/(N(p-2)+p)
    double beta;                  // 1/(N(p-2)+p)
    double h_infty_support_coeff; // (1/gamma_q)^{(q-1)/q}
};

// Validates params and returns all derived constants.
DerivedConstants derived_constants(const Params& params);

// Surface measure of the unit sphere in R^N: 2 pi^{N/2} / Gamma(N/2).
double sphere_surface_measure(int N);

} // namespace hjlab
