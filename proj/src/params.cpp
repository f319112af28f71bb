#include "hjlab/params.hpp"

#include <cmath>

namespace hjlab {

void Params::validate() const {
    if (!(p > 2.0) || !std::isfinite(p))
        throw domain_error("params: p must satisfy p > 2 (got " + std::to_string(p) + ")");
    if (!(q > 1.0) || !std::isfinite(q))
        throw domain_error("params: q must satisfy q > 1 (got " + std::to_string(q) + ")");
    if (N < 1)
        throw domain_error("params: N must be a positive integer (got " + std::to_string(N) + ")");
}

void Params::validate_subcritical() const {
    validate();
    if (!(q < p))
        throw domain_error("params: this operation requires q < p (got q = " +
                           std::to_string(q) + ", p = " + std::to_string(p) + ")");
}

DerivedConstants derived_constants(const Params& params) {
    params.validate();
    const double p = params.p, q = params.q;
    const double N = params.N;
    DerivedConstants d{};
    d.gamma_q = (q - 1.0) * std::pow(q, -q / (q - 1.0));
    d.q_star = p - N / (N + 1.0);
    d.beta = 1.0 / (N * (p - 2.0) + p);
    d.alpha = N * d.beta;
    d.h_infty_support_coeff = std::pow(1.0 / d.gamma_q, (q - 1.0) / q);
    return d;
}

double sphere_surface_measure(int N) {
    if (N < 1) throw domain_error("sphere_surface_measure: N >= 1 required");
    return 2.0 * std::pow(M_PI, N / 2.0) / std::tgamma(N / 2.0);
}

} // namespace hjlab
