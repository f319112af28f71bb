#include "hjlab/rescaler.hpp"

#include "hjlab/numerics.hpp"
#include "hjlab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hjlab {

RescaledField to_selfsimilar(const RadialField& field, const Params& params,
                             const std::vector<double>& target_y_grid) {
    params.validate();
    field.grid.validate();
    if (field.t < 0.0) {
        throw domain_error("to_selfsimilar: field time must be >= 0");
    }
    if (field.u.size() != static_cast<std::size_t>(field.grid.n)) {
        throw domain_error("to_selfsimilar: field size does not match its grid");
    }
    for (std::size_t j = 1; j < target_y_grid.size(); ++j) {
        if (!(target_y_grid[j] > target_y_grid[j - 1])) {
            throw domain_error("to_selfsimilar: target y grid must be strictly increasing");
        }
    }
    if (!target_y_grid.empty() && target_y_grid.front() < 0.0) {
        throw domain_error("to_selfsimilar: target y grid must be nonnegative");
    }

    RescaledField out;
    out.tau = std::log1p(field.t) / params.q;
    out.y_nodes = target_y_grid;
    out.v.resize(target_y_grid.size());
    const double stretch = std::pow(1.0 + field.t, 1.0 / params.q);
    const double dr = field.grid.dr();
    for (std::size_t j = 0; j < target_y_grid.size(); ++j) {
        const double r = target_y_grid[j] * stretch;
        out.v[j] = (r > field.grid.r_max) ? 0.0 : lerp_uniform(0.0, dr, field.u, r);
    }
    return out;
}

MassEstimate estimate_M_infty(const TimeSeries& series, double tail_fraction,
                              const Params& params) {
    params.validate();
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
        throw domain_error("estimate_M_infty: tail_fraction must lie in (0, 1]");
    }

    std::vector<double> times;
    std::vector<double> sups;
    for (const auto& rec : series) {
        if (rec.t > 0.0) {
            times.push_back(rec.t);
            sups.push_back(rec.sup_norm);
        }
    }
    const std::size_t m = times.size();
    if (m < 4) {
        throw domain_error("estimate_M_infty: needs at least 4 positive-time snapshots");
    }
    std::size_t k = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(m)));
    k = std::clamp<std::size_t>(k, 4, m);
    const std::size_t first = m - k;

    // Candidate decay exponents: the two generic convergence rates plus the
    // sup-norm decay exponent of the gradient-dominated regime (finite and
    // positive only when 2q > p). That third entry lets a fully decaying run
    // register M_est ~ 0 instead of a spurious plateau.
    std::vector<double> gammas = {0.5, 1.0};
    if (2.0 * params.q > params.p) {
        const double rho = (params.p - params.q) / (2.0 * params.q - params.p);
        bool dup = false;
        for (double g : gammas) {
            if (std::abs(g - rho) < 1e-12) dup = true;
        }
        if (!dup && rho > 0.0) gammas.push_back(rho);
    }

    MassEstimate best;
    best.fit_residual = std::numeric_limits<double>::infinity();
    std::vector<double> basis(k);
    std::vector<double> data(sups.begin() + static_cast<std::ptrdiff_t>(first), sups.end());
    for (double gamma : gammas) {
        for (std::size_t i = 0; i < k; ++i) {
            basis[i] = std::pow(times[first + i], -gamma);
        }
        const Fit2 fit = fit_const_plus_basis(basis, data);
        if (fit.rms < best.fit_residual) {
            best.fit_residual = fit.rms;
            best.fit_gamma = gamma;
            best.M_est = fit.c0;
        }
    }

    const double sup_first = series.front().sup_norm;
    best.M_est = std::clamp(best.M_est, 0.0, sup_first);
    best.decayed_to_zero = best.M_est < 1e-3 * sup_first;
    return best;
}

double profile_error(const RescaledField& v, double M, const Params& params) {
    params.validate_subcritical();
    if (v.y_nodes.size() != v.v.size()) {
        throw domain_error("profile_error: node/value size mismatch");
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < v.y_nodes.size(); ++j) {
        const double err = std::abs(v.v[j] - eval_h_s(std::abs(v.y_nodes[j]), M, params));
        worst = std::max(worst, err);
    }
    return worst;
}

} // namespace hjlab
