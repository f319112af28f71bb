#include "hjlab/experiment.hpp"

#include "hjlab/numerics.hpp"
#include "hjlab/profiles.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <system_error>

namespace fs = std::filesystem;

namespace hjlab {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// "key = value" lines, '#' comments, blank lines ignored.
std::vector<std::pair<std::string, std::string>> parse_kv_lines(
    const std::string& text) {
    std::vector<std::pair<std::string, std::string>> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw config_error("line " + std::to_string(lineno) +
                               ": expected 'key = value', got '" + line + "'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw config_error("line " + std::to_string(lineno) + ": empty key");
        }
        if (value.empty()) {
            throw config_error("line " + std::to_string(lineno) +
                               ": empty value for key '" + key + "'");
        }
        kv.emplace_back(key, value);
    }
    return kv;
}

double parse_double(const std::string& key, const std::string& v) {
    const char* begin = v.c_str();
    char* end = nullptr;
    errno = 0;
    const double d = std::strtod(begin, &end);
    if (end != begin + v.size() || errno == ERANGE) {
        throw config_error("key '" + key + "': cannot parse '" + v + "' as a number");
    }
    return d;
}

int parse_int(const std::string& key, const std::string& v) {
    const double d = parse_double(key, v);
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d) {
        throw config_error("key '" + key + "': '" + v + "' is not an integer");
    }
    return i;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw config_error("key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) {
            throw config_error("key '" + key + "': empty entry in list '" + v + "'");
        }
        out.push_back(parse_double(key, item));
    }
    if (out.empty()) {
        throw config_error("key '" + key + "': empty list");
    }
    return out;
}

fs::path resolve_path(const fs::path& base_dir, const std::string& v) {
    fs::path p(v);
    return p.is_absolute() ? p : base_dir / p;
}

ICKind parse_ic_kind(const std::string& v) {
    if (v == "bump") return ICKind::Bump;
    if (v == "tent") return ICKind::Tent;
    if (v == "barenblatt") return ICKind::Barenblatt;
    if (v == "custom-csv") return ICKind::CustomCsv;
    throw config_error("ic.kind: expected bump|tent|barenblatt|custom-csv, got '" +
                       v + "'");
}

const char* ic_kind_name(ICKind k) {
    switch (k) {
        case ICKind::Bump: return "bump";
        case ICKind::Tent: return "tent";
        case ICKind::Barenblatt: return "barenblatt";
        default: return "custom-csv";
    }
}

ExperimentConfig parse_impl(const std::string& text, const fs::path& base_dir,
                            const std::string& default_out_name) {
    ExperimentConfig cfg;
    cfg.output_dir = base_dir / default_out_name;
    for (const auto& [key, value] : parse_kv_lines(text)) {
        if (key == "params.p") cfg.params.p = parse_double(key, value);
        else if (key == "params.q") cfg.params.q = parse_double(key, value);
        else if (key == "params.N") cfg.params.N = parse_int(key, value);
        else if (key == "grid.r_max") cfg.grid.r_max = parse_double(key, value);
        else if (key == "grid.n") cfg.grid.n = parse_int(key, value);
        else if (key == "solver.epsilon") cfg.solver.epsilon = parse_double(key, value);
        else if (key == "solver.cfl_safety") cfg.solver.cfl_safety = parse_double(key, value);
        else if (key == "solver.pure_diffusion") cfg.solver.pure_diffusion = parse_bool(key, value);
        else if (key == "solver.support_threshold") cfg.solver.support_threshold = parse_double(key, value);
        else if (key == "solver.lipschitz_bound") cfg.solver.lipschitz_bound = parse_double(key, value);
        else if (key == "ic.kind") cfg.ic_kind = parse_ic_kind(value);
        else if (key == "ic.amplitude") cfg.ic_amplitude = parse_double(key, value);
        else if (key == "ic.radius") cfg.ic_radius = parse_double(key, value);
        else if (key == "ic.mass") cfg.ic_mass = parse_double(key, value);
        else if (key == "ic.csv_path") cfg.ic_csv_path = resolve_path(base_dir, value).string();
        else if (key == "schedule.T") cfg.T = parse_double(key, value);
        else if (key == "schedule.times") cfg.snapshot_times = parse_double_list(key, value);
        else if (key == "schedule.snapshot_count") cfg.snapshot_count = parse_int(key, value);
        else if (key == "schedule.spacing") {
            if (value == "geometric") cfg.geometric_spacing = true;
            else if (value == "linear") cfg.geometric_spacing = false;
            else throw config_error("schedule.spacing: expected geometric|linear, got '" + value + "'");
        }
        else if (key == "schedule.t_first") cfg.t_first = parse_double(key, value);
        else if (key == "rescale.y_max") cfg.rescale_y_max = parse_double(key, value);
        else if (key == "rescale.ny") cfg.rescale_ny = parse_int(key, value);
        else if (key == "rescale.tail_fraction") cfg.tail_fraction = parse_double(key, value);
        else if (key == "output_dir") cfg.output_dir = resolve_path(base_dir, value);
        else throw config_error("unknown key '" + key + "'");
    }
    try {
        cfg.params.validate();
        cfg.grid.validate();
        cfg.solver.validate();
    } catch (const domain_error& e) {
        throw config_error(e.what());
    }
    if (!(cfg.ic_amplitude > 0.0)) throw config_error("ic.amplitude must be > 0");
    if (!(cfg.ic_radius > 0.0)) throw config_error("ic.radius must be > 0");
    if (!(cfg.ic_mass > 0.0)) throw config_error("ic.mass must be > 0");
    if (cfg.ic_kind == ICKind::CustomCsv && cfg.ic_csv_path.empty()) {
        throw config_error("ic.kind = custom-csv requires ic.csv_path");
    }
    if (!(cfg.T >= 0.0)) throw config_error("schedule.T must be >= 0");
    if (cfg.snapshot_count < 1) throw config_error("schedule.snapshot_count must be >= 1");
    if (!(cfg.t_first > 0.0)) throw config_error("schedule.t_first must be > 0");
    for (std::size_t i = 0; i < cfg.snapshot_times.size(); ++i) {
        if (cfg.snapshot_times[i] < 0.0 || cfg.snapshot_times[i] > cfg.T) {
            throw config_error("schedule.times must lie in [0, T]");
        }
        if (i > 0 && cfg.snapshot_times[i] <= cfg.snapshot_times[i - 1]) {
            throw config_error("schedule.times must be strictly increasing");
        }
    }
    if (cfg.rescale_ny < 2) throw config_error("rescale.ny must be >= 2");
    if (!(cfg.tail_fraction > 0.0 && cfg.tail_fraction <= 1.0)) {
        throw config_error("rescale.tail_fraction must lie in (0, 1]");
    }
    return cfg;
}

std::vector<double> schedule_times(const ExperimentConfig& cfg) {
    if (!cfg.snapshot_times.empty()) return cfg.snapshot_times;
    std::vector<double> ts{0.0};
    if (cfg.T == 0.0) return ts;
    const int K = cfg.snapshot_count;
    if (K == 1) {
        ts.push_back(cfg.T);
        return ts;
    }
    if (cfg.geometric_spacing) {
        if (!(cfg.t_first < cfg.T)) {
            throw config_error("schedule: geometric spacing needs t_first < T");
        }
        const double ratio = cfg.T / cfg.t_first;
        for (int k = 0; k < K; ++k) {
            const double t = k + 1 == K
                                 ? cfg.T
                                 : cfg.t_first * std::pow(ratio, double(k) / (K - 1));
            ts.push_back(t);
        }
    } else {
        for (int k = 1; k <= K; ++k) {
            ts.push_back(k == K ? cfg.T : cfg.T * double(k) / K);
        }
    }
    return ts;
}

std::string bool_str(bool v) { return v ? "true" : "false"; }

Regime regime_from_name(const std::string& s) {
    if (s == "A1") return Regime::A1;
    if (s == "A2") return Regime::A2;
    if (s == "B") return Regime::B;
    throw config_error("unknown regime name '" + s + "'");
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// meta.ini as an ordered key -> value map (duplicate keys rejected).
std::map<std::string, std::string> read_kv_file(const fs::path& path) {
    std::map<std::string, std::string> kv;
    for (const auto& [k, v] : parse_kv_lines(read_file(path))) {
        if (!kv.emplace(k, v).second) {
            throw config_error(path.string() + ": duplicate key '" + k + "'");
        }
    }
    return kv;
}

const std::string& kv_get(const std::map<std::string, std::string>& kv,
                          const std::string& key, const fs::path& path) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
        throw config_error(path.string() + ": missing key '" + key + "'");
    }
    return it->second;
}

double kv_get_d(const std::map<std::string, std::string>& kv,
                const std::string& key, const fs::path& path) {
    return parse_double(key, kv_get(kv, key, path));
}

int kv_get_i(const std::map<std::string, std::string>& kv, const std::string& key,
             const fs::path& path) {
    return parse_int(key, kv_get(kv, key, path));
}

bool kv_get_b(const std::map<std::string, std::string>& kv, const std::string& key,
              const fs::path& path) {
    return parse_bool(key, kv_get(kv, key, path));
}

TimeSeries read_series_csv(const fs::path& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw config_error(path.string() + ": empty file");
    TimeSeries series;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::istringstream row(line);
        std::string cell;
        double vals[6];
        for (int c = 0; c < 6; ++c) {
            if (!std::getline(row, cell, ',')) {
                throw config_error(path.string() + ": line " +
                                   std::to_string(lineno) + ": expected 6 columns");
            }
            vals[c] = parse_double("series column", trim(cell));
        }
        series.push_back(SeriesRecord{vals[0], vals[1], vals[2], vals[3], vals[4],
                                      vals[5]});
    }
    return series;
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text,
                                   const fs::path& base_dir) {
    return parse_impl(text, base_dir, "run_out");
}

ExperimentConfig parse_config(const fs::path& path) {
    const std::string text = read_file(path);
    const fs::path base = path.has_parent_path() ? path.parent_path() : fs::path(".");
    return parse_impl(text, base, path.stem().string() + "_out");
}

RadialField make_initial_condition(const ExperimentConfig& config) {
    config.params.validate();
    config.grid.validate();
    RadialField f{config.grid, 0.0, std::vector<double>(config.grid.n, 0.0)};
    const double A = config.ic_amplitude;
    const double R0 = config.ic_radius;
    switch (config.ic_kind) {
        case ICKind::Bump:
            for (int i = 0; i < config.grid.n; ++i) {
                const double s = 1.0 - std::pow(config.grid.node(i) / R0, 2);
                f.u[i] = s > 0.0 ? A * s * s : 0.0;
            }
            break;
        case ICKind::Tent:
            for (int i = 0; i < config.grid.n; ++i) {
                const double s = 1.0 - config.grid.node(i) / R0;
                f.u[i] = s > 0.0 ? A * s : 0.0;
            }
            break;
        case ICKind::Barenblatt:
            for (int i = 0; i < config.grid.n; ++i) {
                f.u[i] = eval_barenblatt(1.0, config.grid.node(i), config.ic_mass,
                                         config.params);
            }
            break;
        case ICKind::CustomCsv: {
            const auto rows = read_two_column_csv(config.ic_csv_path);
            if (rows.size() < 2) {
                throw config_error("ic.csv_path: needs at least 2 rows");
            }
            std::vector<double> xs, vs;
            xs.reserve(rows.size());
            vs.reserve(rows.size());
            for (const auto& [x, v] : rows) {
                if (!xs.empty() && x <= xs.back()) {
                    throw config_error("ic.csv_path: radii must be strictly increasing");
                }
                if (!(v >= 0.0) || !std::isfinite(v)) {
                    throw config_error("ic.csv_path: values must be finite and >= 0");
                }
                xs.push_back(x);
                vs.push_back(v);
            }
            for (int i = 0; i < config.grid.n; ++i) {
                const double r = config.grid.node(i);
                f.u[i] = r > xs.back() ? 0.0 : lerp_sorted(xs, vs, r);
            }
            break;
        }
    }
    return f;
}

void atomic_write(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw config_error("cannot create directory " +
                               path.parent_path().string() + ": " + ec.message());
        }
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw config_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw config_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        throw config_error("cannot rename " + tmp.string() + " -> " + path.string() +
                           ": " + ec.message());
    }
}

void write_csv(const fs::path& path, const std::string& header,
               const std::vector<std::pair<double, double>>& rows) {
    std::string s = header;
    s += '\n';
    for (const auto& [a, b] : rows) {
        s += format_shortest(a);
        s += ',';
        s += format_shortest(b);
        s += '\n';
    }
    atomic_write(path, s);
}

std::vector<std::pair<double, double>> read_two_column_csv(const fs::path& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw config_error(path.string() + ": empty file");
    std::vector<std::pair<double, double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw config_error(path.string() + ": line " + std::to_string(lineno) +
                               ": expected 2 columns");
        }
        rows.emplace_back(parse_double("csv column", trim(line.substr(0, comma))),
                          parse_double("csv column", trim(line.substr(comma + 1))));
    }
    return rows;
}

std::string render_report(const ConvergenceReport& report,
                          const RegimeReport& regime,
                          const std::vector<CheckResult>& checks,
                          const std::vector<std::string>& warnings) {
    std::string r;
    r += "regime = " + regime_name(regime.regime) + "\n";
    r += "threshold_ratio = " + format_shortest(regime.threshold_ratio) + "\n";
    r += "M_infty_estimate = " + format_shortest(report.mass.M_est) + "\n";
    r += "fit_gamma = " + format_shortest(report.mass.fit_gamma) + "\n";
    r += "fit_residual = " + format_shortest(report.mass.fit_residual) + "\n";
    r += "decayed_to_zero = " + bool_str(report.mass.decayed_to_zero) + "\n";
    for (const auto& [tau, err] : report.errors_by_tau) {
        r += "profile_error " + format_shortest(tau) + " " + format_shortest(err) +
             "\n";
    }
    for (const auto& w : warnings) {
        r += "warning: " + w + "\n";
    }
    bool passed = true;
    for (const auto& c : checks) {
        if (c.status == CheckStatus::Fail) passed = false;
        r += c.line() + "\n";
    }
    r += "checks_passed = " + bool_str(passed) + "\n";
    return r;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
    ExperimentOutcome out;
    const Params& P = config.params;
    const RadialField u0 = make_initial_condition(config);
    const SolverConfig rc = config.solver.resolved(u0);
    const RegimeReport regime = classify_regime(u0, P);
    const DerivedConstants dc = derived_constants(P);

    const SeriesRecord s0 = field_stats(u0, P, rc);
    ICMeta meta;
    meta.sup0 = s0.sup_norm;
    meta.grad0 = s0.grad_sup;
    meta.min_plap0 = s0.min_plap;
    meta.R0 = s0.support_radius;
    meta.w2inf = config.ic_kind == ICKind::Bump;
    try {
        const double y_min = -(meta.sup0 + meta.R0 + 6.0);
        const TravelingWave tw = traveling_wave(P, y_min, 400, 1e-10);
        meta.mu = wave_offset_mu(tw, meta.R0, meta.sup0);
        meta.has_mu = true;
    } catch (const std::exception& e) {
        out.warnings.push_back(std::string("wave offset unavailable: ") + e.what());
    }

    const std::vector<double> times = schedule_times(config);
    EvolveResult ev = evolve(u0, config.T, rc, P, times);
    meta.dt_initial = ev.dt_initial;
    for (const auto& w : ev.warnings) out.warnings.push_back(w);

    double y_max = config.rescale_y_max;
    if (y_max <= 0.0) {
        y_max = 1.2 * std::pow(meta.sup0 / dc.gamma_q, (P.q - 1.0) / P.q) + 1.0;
    }
    std::vector<double> y_grid(config.rescale_ny);
    for (int j = 0; j < config.rescale_ny; ++j) {
        y_grid[j] = y_max * double(j) / (config.rescale_ny - 1);
    }
    std::vector<RescaledField> rescaled;
    rescaled.reserve(ev.snapshots.size());
    for (const auto& snap : ev.snapshots) {
        rescaled.push_back(to_selfsimilar(snap, P, y_grid));
    }

    try {
        out.report.mass = estimate_M_infty(ev.series, config.tail_fraction, P);
        meta.has_mass_estimate = true;
        meta.M_est = out.report.mass.M_est;
        meta.decayed_to_zero = out.report.mass.decayed_to_zero;
    } catch (const domain_error& e) {
        out.warnings.push_back(std::string("mass estimate unavailable: ") + e.what());
    }
    if (meta.has_mass_estimate) {
        for (const auto& rf : rescaled) {
            if (rf.tau > 0.0) {
                out.report.errors_by_tau.emplace_back(
                    rf.tau, profile_error(rf, meta.M_est, P));
            }
        }
    }

    out.checks = run_checks(ev.series, ev.snapshots, P, rc, meta,
                            BalanceSeries(ev.source_integral));
    for (const auto& c : out.checks) {
        if (c.status == CheckStatus::Fail) out.checks_passed = false;
    }
    out.series = ev.series;

    // ---- artifacts ------------------------------------------------------
    const fs::path dir = config.output_dir;
    {
        std::string s = "t,sup_norm,grad_sup,l1_norm,min_plap,support_radius\n";
        for (const auto& rec : ev.series) {
            s += format_shortest(rec.t);
            s += ',';
            s += format_shortest(rec.sup_norm);
            s += ',';
            s += format_shortest(rec.grad_sup);
            s += ',';
            s += format_shortest(rec.l1_norm);
            s += ',';
            s += format_shortest(rec.min_plap);
            s += ',';
            s += format_shortest(rec.support_radius);
            s += '\n';
        }
        atomic_write(dir / "series.csv", s);
    }
    std::vector<std::string> snap_files, rescaled_files;
    for (std::size_t k = 0; k < ev.snapshots.size(); ++k) {
        const auto& snap = ev.snapshots[k];
        std::string name = "snapshot_" + format_shortest(snap.t) + ".csv";
        std::string s = "r,u\n";
        for (int i = 0; i < snap.grid.n; ++i) {
            s += format_shortest(snap.grid.node(i));
            s += ',';
            s += format_shortest(snap.u[i]);
            s += '\n';
        }
        atomic_write(dir / name, s);
        snap_files.push_back(std::move(name));

        const auto& rf = rescaled[k];
        std::string rname = "rescaled_" + format_shortest(rf.tau) + ".csv";
        std::string rs = "y,v\n";
        for (std::size_t j = 0; j < rf.y_nodes.size(); ++j) {
            rs += format_shortest(rf.y_nodes[j]);
            rs += ',';
            rs += format_shortest(rf.v[j]);
            rs += '\n';
        }
        atomic_write(dir / rname, rs);
        rescaled_files.push_back(std::move(rname));
    }
    {
        std::vector<std::pair<double, double>> rows;
        for (std::size_t k = 0; k < ev.series.size(); ++k) {
            rows.emplace_back(ev.series[k].t, ev.source_integral[k]);
        }
        write_csv(dir / "balance.csv", "t,source_integral", rows);
    }
    write_csv(dir / "errors.csv", "tau,sup_error", out.report.errors_by_tau);
    {
        std::string m = "# run metadata; consumed by the verify subcommand\n";
        m += "params.p = " + format_shortest(P.p) + "\n";
        m += "params.q = " + format_shortest(P.q) + "\n";
        m += "params.N = " + std::to_string(P.N) + "\n";
        m += "grid.r_max = " + format_shortest(config.grid.r_max) + "\n";
        m += "grid.n = " + std::to_string(config.grid.n) + "\n";
        m += "solver.epsilon = " + format_shortest(rc.epsilon) + "\n";
        m += "solver.cfl_safety = " + format_shortest(rc.cfl_safety) + "\n";
        m += "solver.pure_diffusion = " + bool_str(rc.pure_diffusion) + "\n";
        m += "solver.support_threshold = " + format_shortest(rc.support_threshold) + "\n";
        m += "solver.lipschitz_bound = " + format_shortest(rc.lipschitz_bound) + "\n";
        m += "ic.kind = " + std::string(ic_kind_name(config.ic_kind)) + "\n";
        m += "ic.amplitude = " + format_shortest(config.ic_amplitude) + "\n";
        m += "ic.radius = " + format_shortest(config.ic_radius) + "\n";
        m += "ic.mass = " + format_shortest(config.ic_mass) + "\n";
        if (!config.ic_csv_path.empty()) {
            m += "ic.csv_path = " + config.ic_csv_path + "\n";
        }
        m += "schedule.T = " + format_shortest(config.T) + "\n";
        m += "rescale.y_max = " + format_shortest(y_max) + "\n";
        m += "rescale.ny = " + std::to_string(config.rescale_ny) + "\n";
        m += "rescale.tail_fraction = " + format_shortest(config.tail_fraction) + "\n";
        m += "meta.sup0 = " + format_shortest(meta.sup0) + "\n";
        m += "meta.grad0 = " + format_shortest(meta.grad0) + "\n";
        m += "meta.min_plap0 = " + format_shortest(meta.min_plap0) + "\n";
        m += "meta.R0 = " + format_shortest(meta.R0) + "\n";
        m += "meta.w2inf = " + bool_str(meta.w2inf) + "\n";
        m += "meta.has_mu = " + bool_str(meta.has_mu) + "\n";
        m += "meta.mu = " + format_shortest(meta.mu) + "\n";
        m += "meta.dt_initial = " + format_shortest(meta.dt_initial) + "\n";
        m += "meta.steps = " + std::to_string(ev.steps) + "\n";
        m += "meta.has_mass_estimate = " + bool_str(meta.has_mass_estimate) + "\n";
        m += "meta.M_est = " + format_shortest(meta.M_est) + "\n";
        m += "meta.fit_gamma = " + format_shortest(out.report.mass.fit_gamma) + "\n";
        m += "meta.fit_residual = " + format_shortest(out.report.mass.fit_residual) + "\n";
        m += "meta.decayed_to_zero = " + bool_str(meta.decayed_to_zero) + "\n";
        m += "meta.regime = " + regime_name(regime.regime) + "\n";
        m += "meta.threshold_ratio = " + format_shortest(regime.threshold_ratio) + "\n";
        m += "snapshot.count = " + std::to_string(ev.snapshots.size()) + "\n";
        for (std::size_t k = 0; k < ev.snapshots.size(); ++k) {
            const std::string pre = "snapshot." + std::to_string(k);
            m += pre + ".t = " + format_shortest(ev.snapshots[k].t) + "\n";
            m += pre + ".tau = " + format_shortest(rescaled[k].tau) + "\n";
            m += pre + ".file = " + snap_files[k] + "\n";
            m += pre + ".rescaled = " + rescaled_files[k] + "\n";
        }
        m += "warning.count = " + std::to_string(out.warnings.size()) + "\n";
        for (std::size_t k = 0; k < out.warnings.size(); ++k) {
            m += "warning." + std::to_string(k) + " = " + out.warnings[k] + "\n";
        }
        atomic_write(dir / "meta.ini", m);
    }
    atomic_write(dir / "report.txt",
                 render_report(out.report, regime, out.checks, out.warnings));
    return out;
}

bool verify_run(const fs::path& series_csv, std::string& rebuilt,
                std::string& stored) {
    const fs::path dir =
        series_csv.has_parent_path() ? series_csv.parent_path() : fs::path(".");
    const fs::path meta_path = dir / "meta.ini";
    const auto kv = read_kv_file(meta_path);

    Params P;
    P.p = kv_get_d(kv, "params.p", meta_path);
    P.q = kv_get_d(kv, "params.q", meta_path);
    P.N = kv_get_i(kv, "params.N", meta_path);
    RadialGrid grid;
    grid.r_max = kv_get_d(kv, "grid.r_max", meta_path);
    grid.n = kv_get_i(kv, "grid.n", meta_path);
    SolverConfig sc;
    sc.epsilon = kv_get_d(kv, "solver.epsilon", meta_path);
    sc.cfl_safety = kv_get_d(kv, "solver.cfl_safety", meta_path);
    sc.pure_diffusion = kv_get_b(kv, "solver.pure_diffusion", meta_path);
    sc.support_threshold = kv_get_d(kv, "solver.support_threshold", meta_path);
    sc.lipschitz_bound = kv_get_d(kv, "solver.lipschitz_bound", meta_path);

    ICMeta meta;
    meta.sup0 = kv_get_d(kv, "meta.sup0", meta_path);
    meta.grad0 = kv_get_d(kv, "meta.grad0", meta_path);
    meta.min_plap0 = kv_get_d(kv, "meta.min_plap0", meta_path);
    meta.R0 = kv_get_d(kv, "meta.R0", meta_path);
    meta.w2inf = kv_get_b(kv, "meta.w2inf", meta_path);
    meta.has_mu = kv_get_b(kv, "meta.has_mu", meta_path);
    meta.mu = kv_get_d(kv, "meta.mu", meta_path);
    meta.dt_initial = kv_get_d(kv, "meta.dt_initial", meta_path);
    meta.has_mass_estimate = kv_get_b(kv, "meta.has_mass_estimate", meta_path);
    meta.M_est = kv_get_d(kv, "meta.M_est", meta_path);
    meta.decayed_to_zero = kv_get_b(kv, "meta.decayed_to_zero", meta_path);

    const TimeSeries series = read_series_csv(series_csv);

    const int count = kv_get_i(kv, "snapshot.count", meta_path);
    std::vector<RadialField> snapshots;
    ConvergenceReport rep;
    rep.mass.M_est = meta.M_est;
    rep.mass.fit_gamma = kv_get_d(kv, "meta.fit_gamma", meta_path);
    rep.mass.fit_residual = kv_get_d(kv, "meta.fit_residual", meta_path);
    rep.mass.decayed_to_zero = meta.decayed_to_zero;
    for (int k = 0; k < count; ++k) {
        const std::string pre = "snapshot." + std::to_string(k);
        RadialField f;
        f.grid = grid;
        f.t = kv_get_d(kv, pre + ".t", meta_path);
        const auto rows =
            read_two_column_csv(dir / kv_get(kv, pre + ".file", meta_path));
        if (static_cast<int>(rows.size()) != grid.n) {
            throw config_error("snapshot " + std::to_string(k) +
                               ": row count does not match grid.n");
        }
        f.u.reserve(rows.size());
        for (const auto& [r, u] : rows) f.u.push_back(u);
        snapshots.push_back(std::move(f));

        const double tau = kv_get_d(kv, pre + ".tau", meta_path);
        if (meta.has_mass_estimate && tau > 0.0) {
            const auto rrows =
                read_two_column_csv(dir / kv_get(kv, pre + ".rescaled", meta_path));
            RescaledField rf;
            rf.tau = tau;
            for (const auto& [y, v] : rrows) {
                rf.y_nodes.push_back(y);
                rf.v.push_back(v);
            }
            rep.errors_by_tau.emplace_back(tau, profile_error(rf, meta.M_est, P));
        }
    }

    BalanceSeries balance;
    for (const auto& [t, s] : read_two_column_csv(dir / "balance.csv")) {
        balance.push_back(s);
    }

    RegimeReport regime;
    regime.regime = regime_from_name(kv_get(kv, "meta.regime", meta_path));
    regime.threshold_ratio = kv_get_d(kv, "meta.threshold_ratio", meta_path);

    std::vector<std::string> warnings;
    const int wc = kv_get_i(kv, "warning.count", meta_path);
    for (int k = 0; k < wc; ++k) {
        warnings.push_back(kv_get(kv, "warning." + std::to_string(k), meta_path));
    }

    const auto checks = run_checks(series, snapshots, P, sc, meta, balance);
    rebuilt = render_report(rep, regime, checks, warnings);
    stored = read_file(dir / "report.txt");
    return rebuilt == stored;
}

std::vector<TableRow> aggregate_runs(const std::vector<fs::path>& configs) {
    std::vector<TableRow> rows;
    for (const auto& path : configs) {
        const ExperimentConfig cfg = parse_config(path);
        TableRow row;
        row.config = path.filename().string();
        row.dr = cfg.grid.dr();
        row.final_t = cfg.T;
        const fs::path meta_path = cfg.output_dir / "meta.ini";
        const auto kv = read_kv_file(meta_path);
        row.M_est = kv_get_d(kv, "meta.M_est", meta_path);
        const auto errs = read_two_column_csv(cfg.output_dir / "errors.csv");
        row.final_profile_error =
            errs.empty() ? std::numeric_limits<double>::quiet_NaN()
                         : errs.back().second;
        row.checks_failed = 0;
        std::istringstream rep(read_file(cfg.output_dir / "report.txt"));
        std::string line;
        while (std::getline(rep, line)) {
            if (line.find(" FAIL ") != std::string::npos) ++row.checks_failed;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace hjlab
