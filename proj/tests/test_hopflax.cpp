// Variational evaluator tests. The independent oracle is a brute-force dense
// scan of the same sup formula over the full line (including the mirrored
// half for radial data, which validates the even-extension domination
// argument used by the evaluator).
#include <doctest.h>

#include "hjlab/hopflax.hpp"
#include "hjlab/numerics.hpp"
#include "hjlab/params.hpp"
#include "hjlab/profiles.hpp"

#include <cmath>
#include <vector>

using namespace hjlab;
using doctest::Approx;

namespace {

Params make_params(double p, double q, int N) {
    Params P;
    P.p = p;
    P.q = q;
    P.N = N;
    return P;
}

std::vector<double> uniform_nodes(double a, double b, int n) {
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = a + (b - a) * i / (n - 1);
    return x;
}

// Dense scan of sup_z { h0(z) - gamma_q |y - z e^{-tau}|^{q'} (1-e^{-q tau})^{-1/(q-1)} }_+
// over the full line; radial samples (nodes >= 0) are extended evenly.
double brute_force_value(const SampledInitialData& h0, double tau, double y,
                         const Params& params, int n_scan) {
    const double q = params.q;
    const double gamma_q = (q - 1.0) * std::pow(q, -q / (q - 1.0));
    const double qp = q / (q - 1.0);
    const double decay = std::exp(-tau);
    const double scale =
        gamma_q * std::pow(1.0 - std::exp(-q * tau), -1.0 / (q - 1.0));

    const bool radial = h0.nodes.front() >= 0.0;
    const double ext = std::max(std::abs(h0.nodes.front()), std::abs(h0.nodes.back()));
    const double z0 = h0.nodes.front();
    const double dz = (h0.nodes.back() - z0) / (double(h0.nodes.size()) - 1);
    auto h0_at = [&](double z) {
        if (radial) z = std::abs(z);
        if (z < h0.nodes.front() || z > h0.nodes.back()) return 0.0;
        return lerp_uniform(z0, dz, h0.values, z);
    };

    double best = 0.0; // the zero baseline always competes
    for (int i = 0; i <= n_scan; ++i) {
        const double z = -ext + 2.0 * ext * i / n_scan;
        const double c = h0_at(z) - scale * std::pow(std::abs(y - z * decay), qp);
        best = std::max(best, c);
    }
    return best;
}

} // namespace

TEST_CASE("zero initial data stays zero") {
    const Params P = make_params(3, 2, 1);
    auto h0 = SampledInitialData::from_values(uniform_nodes(0.0, 2.0, 21),
                                              std::vector<double>(21, 0.0));
    CHECK(h0.support_radius == 0.0);
    const auto res = hopf_lax_evolve(h0, 1.0, uniform_nodes(0.0, 3.0, 31), P);
    for (double v : res.values) CHECK(v == 0.0);
}

TEST_CASE("sup norm is preserved and the range stays in [0, sup0]") {
    const Params P = make_params(3, 2, 1);
    const int n = 401;
    auto nodes = uniform_nodes(0.0, 2.0, n);
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) {
        const double r = nodes[i];
        vals[i] = r < 1.0 ? (1.0 - r * r) * (1.0 - r * r) : 0.0;
    }
    auto h0 = SampledInitialData::from_values(nodes, vals);
    for (double tau : {0.3, 1.0, 5.0}) {
        const auto res = hopf_lax_evolve(h0, tau, uniform_nodes(0.0, 2.5, 251), P);
        double mx = 0.0;
        for (double v : res.values) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0 + 1e-12);
            mx = std::max(mx, v);
        }
        // The argmax of h0 sits at r = 0, so the query at y = 0 attains sup0.
        CHECK(res.values.front() == Approx(1.0).epsilon(1e-12));
        CHECK(mx == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("radial evaluation matches a dense full-line scan") {
    const Params P = make_params(3, 2, 1);
    const int n = 201;
    auto nodes = uniform_nodes(0.0, 2.0, n);
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) {
        const double r = nodes[i];
        vals[i] = r < 1.0 ? (1.0 - r * r) * (1.0 - r * r) : 0.0;
    }
    auto h0 = SampledInitialData::from_values(nodes, vals);

    const std::vector<double> queries = {0.0, 0.15, 0.4, 0.8, 1.3, 1.9};
    for (double tau : {0.4, 1.3}) {
        const auto res = hopf_lax_evolve(h0, tau, queries, P);
        for (std::size_t k = 0; k < queries.size(); ++k) {
            const double ref = brute_force_value(h0, tau, queries[k], P, 400000);
            CHECK(res.values[k] == Approx(ref).scale(1).epsilon(1e-5));
        }
    }
}

TEST_CASE("line samples with asymmetric data match the dense scan") {
    const Params P = make_params(3.5, 2.5, 1); // non-quadratic cost exponent
    const int n = 401;
    auto nodes = uniform_nodes(-2.0, 2.0, n);
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i)
        vals[i] = std::max(0.0, 0.8 - std::abs(nodes[i] - 0.5));
    auto h0 = SampledInitialData::from_values(nodes, vals);
    CHECK(h0.support_radius == Approx(1.3).epsilon(1e-12));

    const std::vector<double> queries = {-1.5, -0.3, 0.0, 0.6, 1.4};
    const auto res = hopf_lax_evolve(h0, 0.7, queries, P);
    for (std::size_t k = 0; k < queries.size(); ++k) {
        const double ref = brute_force_value(h0, 0.7, queries[k], P, 400000);
        CHECK(res.values[k] == Approx(ref).scale(1).epsilon(1e-5));
    }
}

TEST_CASE("the steady profile is (approximately) a fixed point") {
    const Params P = make_params(3, 2, 1);
    const int n = 501;
    auto nodes = uniform_nodes(0.0, 2.5, n);
    const double dr = 2.5 / (n - 1);
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) vals[i] = eval_h_s(nodes[i], 1.0, P);
    auto h0 = SampledInitialData::from_values(nodes, vals);

    for (double tau : {0.5, 2.0, 6.0}) {
        const auto res = hopf_lax_evolve(h0, tau, nodes, P);
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(res.values[i] - vals[i]));
        CHECK(worst <= 5.0 * dr);
    }
}

TEST_CASE("a compact bump converges to the steady profile of its height") {
    const Params P = make_params(3, 2, 1);
    const int n = 501;
    auto nodes = uniform_nodes(0.0, 2.5, n);
    std::vector<double> vals(n);
    for (int i = 0; i < n; ++i) {
        const double r = nodes[i];
        vals[i] = r < 1.0 ? (1.0 - r * r) * (1.0 - r * r) : 0.0;
    }
    auto h0 = SampledInitialData::from_values(nodes, vals);

    auto err_at = [&](double tau) {
        const auto res = hopf_lax_evolve(h0, tau, nodes, P);
        double worst = 0.0;
        for (int i = 0; i < n; ++i)
            worst = std::max(worst,
                             std::abs(res.values[i] - eval_h_s(nodes[i], 1.0, P)));
        return worst;
    };
    const double e1 = err_at(1.0);
    const double e6 = err_at(6.0);
    CHECK(e6 < e1);
    CHECK(e6 <= 0.02); // sup0 = 1
}

TEST_CASE("tail smallness predicate") {
    auto pos = uniform_nodes(-2.0, 2.0, 41);
    std::vector<double> vals(41, 0.0);
    for (int i = 0; i < 41; ++i)
        if (std::abs(pos[i]) < 1.0) vals[i] = 0.5;
    CHECK(tail_smallness(pos, vals, 1.5, 1e-9));
    CHECK(tail_smallness(pos, vals, 1.0, 0.5));
    vals[40] = 1e-3; // value at |pos| = 2
    CHECK_FALSE(tail_smallness(pos, vals, 1.5, 1e-9));
    CHECK(tail_smallness(pos, vals, 1.5, 1e-2));
    CHECK_THROWS_AS(tail_smallness(pos, vals, 2.5, 1e-9), domain_error);
    CHECK_THROWS_AS(tail_smallness({}, {}, 0.5, 1e-9), domain_error);
}

TEST_CASE("input validation") {
    const Params P = make_params(3, 2, 1);
    auto h0 = SampledInitialData::from_values(uniform_nodes(0.0, 1.0, 11),
                                              std::vector<double>(11, 0.5));
    CHECK_THROWS_AS(hopf_lax_evolve(h0, 0.0, {0.0}, P), domain_error);
    CHECK_THROWS_AS(hopf_lax_evolve(h0, -1.0, {0.0}, P), domain_error);
    CHECK_THROWS_AS(
        SampledInitialData::from_values({0.0, 1.0}, {1.0, -0.1}), domain_error);
    CHECK_THROWS_AS(
        SampledInitialData::from_values({0.0, 1.0, 2.0}, {1.0, 0.5}), domain_error);
    CHECK_THROWS_AS(SampledInitialData::from_values({0.0}, {1.0}), domain_error);
}
