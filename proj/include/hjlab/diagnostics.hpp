// Per-snapshot statistics and the falsifiable runtime checks:
//   CHK-MAXP        0 <= u <= ||u0||inf (exact scheme property)
//   CHK-GRADMON     ||Du(t)||inf non-increasing
//   CHK-GRADRATE    log-log decay slope of ||Du||inf in [-1/q - 0.15, 0]
//   CHK-SEMICONV-12 min Delta_p u >= -1.25 [N(p-1)/(q(q-1))] G0^{p-q} / t
//   CHK-SEMICONV-16 min Delta_p u >= -1.1 |min Delta_p u0|    (W^{2,inf} data)
//   CHK-SEMICONV-11 scale-invariant min Delta_p u * t^{p/q} / sup0^{(p-q)/q}
//   CHK-SUPPORT     support radius <= max{R0, t - mu} + 2 dr (+ eps tail)
//   CHK-MASSBAL     L1 growth balances the accumulated source integral
//   CHK-L1          L1 non-decreasing; regime A grows by >= 1.5 on long runs
//   CHK-DECAY       regime B with decay: sup * t^{(p-q)/(2q-p)} bounded
#pragma once

#include "hjlab/params.hpp"
#include "hjlab/series.hpp"
#include "hjlab/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hjlab {

SeriesRecord field_stats(const RadialField& field, const Params& params,
                         const SolverConfig& config);

enum class CheckStatus { Pass, Fail, Skipped };

struct CheckResult {
    std::string name;
    CheckStatus status;
    double measured = 0.0;
    double bound = 0.0;
    double slack = 0.0;
    std::string detail; // reason when Skipped, context otherwise

    std::string line() const; // "CHK-NAME PASS|FAIL|SKIPPED m b s [# detail]"
};

// Initial-data facts the checks need but cannot recover from the series.
struct ICMeta {
    double sup0 = 0.0;       // ||u0||inf
    double grad0 = 0.0;      // measured ||Du0||inf
    double min_plap0 = 0.0;  // discrete min Delta_p u0
    double R0 = 0.0;         // initial support radius
    bool w2inf = false;      // initial data in W^{2,inf} (bump, barenblatt)
    double mu = 0.0;         // wave offset; valid only when has_mu
    bool has_mu = false;
    double dt_initial = 0.0; // first stable dt (sets the burn-in time)
    // From estimate_M_infty when the pipeline ran it (CHK-DECAY input).
    bool has_mass_estimate = false;
    double M_est = 0.0;
    bool decayed_to_zero = false;
};

// Balance data for CHK-MASSBAL: cumulative source integral per snapshot.
using BalanceSeries = std::vector<double>;

std::vector<CheckResult> run_checks(const TimeSeries& series,
                                    const std::vector<RadialField>& snapshots,
                                    const Params& params,
                                    const SolverConfig& config,
                                    const ICMeta& ic_meta,
                                    const std::optional<BalanceSeries>& balance);

enum class Regime { A1, A2, B };

struct RegimeReport {
    Regime regime;
    // ||u0||inf / |inf Delta_p u0|^{(p-q)/q}; +inf when the denominator
    // vanishes. Reported for regime B only (comparison across runs).
    double threshold_ratio = 0.0;
};

std::string regime_name(Regime r);

// Regime from (p, q, N): A1 for q <= p-1, A2 for p-1 < q <= q_star,
// B for q_star < q < p; q >= p is rejected. The threshold ratio uses the
// unregularized (epsilon = 0) discrete stats of u0.
RegimeReport classify_regime(const RadialField& u0_field, const Params& params);

} // namespace hjlab
