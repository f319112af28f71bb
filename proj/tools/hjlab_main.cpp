// Command line front end. Exit codes: 0 success, 2 configuration error,
// 3 parameter/domain error, 4 numerical failure, 5 checks failed (or a
// verify mismatch).
#include "hjlab/experiment.hpp"
#include "hjlab/format.hpp"
#include "hjlab/profiles.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace hjlab;

namespace {

std::vector<fs::path> expand_glob(const std::string& pattern) {
    const fs::path p(pattern);
    const std::string fname = p.filename().string();
    if (fname.find('*') == std::string::npos &&
        fname.find('?') == std::string::npos) {
        return {p};
    }
    std::string re;
    for (const char ch : fname) {
        if (ch == '*') {
            re += ".*";
        } else if (ch == '?') {
            re += '.';
        } else if (std::isalnum(static_cast<unsigned char>(ch))) {
            re += ch;
        } else {
            re += '\\';
            re += ch;
        }
    }
    const std::regex rx(re);
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() &&
            std::regex_match(entry.path().filename().string(), rx)) {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    if (out.empty()) {
        throw config_error("no files match pattern '" + pattern + "'");
    }
    return out;
}

int cmd_run(const std::string& config_path, const std::string& out_override) {
    ExperimentConfig cfg = parse_config(config_path);
    if (!out_override.empty()) cfg.output_dir = out_override;
    const ExperimentOutcome outcome = run_experiment(cfg);
    std::ifstream report(cfg.output_dir / "report.txt");
    std::cout << report.rdbuf();
    std::cout << "artifacts: " << cfg.output_dir.string() << "\n";
    return outcome.checks_passed ? 0 : 5;
}

int cmd_verify(const std::string& series_csv) {
    std::string rebuilt, stored;
    const bool ok = verify_run(series_csv, rebuilt, stored);
    if (ok) {
        std::cout << "verify: report reproduced byte-for-byte ("
                  << rebuilt.size() << " bytes)\n";
        return 0;
    }
    std::cout << "verify: MISMATCH\n--- stored ---\n"
              << stored << "--- rebuilt ---\n"
              << rebuilt;
    return 5;
}

int cmd_table(const std::vector<std::string>& patterns, const std::string& out) {
    std::vector<fs::path> configs;
    for (const auto& pat : patterns) {
        for (auto& p : expand_glob(pat)) configs.push_back(std::move(p));
    }
    const auto rows = aggregate_runs(configs);
    std::string csv = "config,dr,final_t,M_est,final_profile_error,checks_failed\n";
    for (const auto& row : rows) {
        csv += row.config;
        csv += ',';
        csv += format_shortest(row.dr);
        csv += ',';
        csv += format_shortest(row.final_t);
        csv += ',';
        csv += format_shortest(row.M_est);
        csv += ',';
        csv += format_shortest(row.final_profile_error);
        csv += ',';
        csv += std::to_string(row.checks_failed);
        csv += '\n';
    }
    atomic_write(out, csv);
    std::cout << csv;
    std::cout << "wrote " << out << "\n";
    return 0;
}

struct ProfileArgs {
    std::string name;
    Params params;
    double M = 1.0;
    double t = 1.0;
    double mass = 1.0;
    double r_max = 4.0;
    int n = 401;
    double y_min = -10.0;
    double tol = 1e-10;
    std::string out;
};

int cmd_profile(const ProfileArgs& a) {
    std::string csv = "r,value\n";
    const std::string out = a.out.empty() ? a.name + ".csv" : a.out;
    auto emit = [&csv](double x, double v) {
        csv += format_17(x);
        csv += ',';
        csv += format_17(v);
        csv += '\n';
    };
    if (a.name == "h_s" || a.name == "h_infty" || a.name == "barenblatt") {
        if (a.n < 2) throw config_error("profile: --n must be >= 2");
        if (!(a.r_max > 0.0)) throw config_error("profile: --r-max must be > 0");
        for (int i = 0; i < a.n; ++i) {
            const double r = a.r_max * double(i) / (a.n - 1);
            double v;
            if (a.name == "h_s") {
                v = eval_h_s(r, a.M, a.params);
            } else if (a.name == "h_infty") {
                v = eval_h_infty(a.t, r, a.M, a.params);
            } else {
                v = eval_barenblatt(a.t, r, a.mass, a.params);
            }
            emit(r, v);
        }
    } else if (a.name == "wave_f" || a.name == "wave_F") {
        if (a.n < 2) throw config_error("profile: --n must be >= 2");
        const TravelingWave tw = traveling_wave(a.params, a.y_min, a.n, a.tol);
        for (int i = 0; i < a.n; ++i) {
            const double y = a.y_min * (1.0 - double(i) / (a.n - 1));
            emit(y, a.name == "wave_f" ? wave_f(tw, y) : wave_F(tw, y));
        }
    } else {
        throw config_error(
            "profile: unknown name '" + a.name +
            "' (expected h_s|h_infty|barenblatt|wave_f|wave_F)");
    }
    atomic_write(out, csv);
    std::cout << "wrote " << out << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical laboratory for a degenerate diffusion equation with "
                 "gradient growth: experiment runner, profile dumps, artifact "
                 "verification"};
    app.require_subcommand(1);

    std::string run_config, run_out;
    auto* run = app.add_subcommand("run", "run one experiment config");
    run->add_option("config", run_config, "experiment config file")->required();
    run->add_option("--out", run_out, "override output_dir");

    std::string verify_series;
    auto* verify = app.add_subcommand(
        "verify", "re-run diagnostics on stored artifacts and compare reports");
    verify->add_option("series", verify_series, "path to a stored series.csv")
        ->required();

    std::vector<std::string> table_patterns;
    std::string table_out = "table.csv";
    auto* table = app.add_subcommand(
        "table", "aggregate stored runs into a convergence table");
    table->add_option("configs", table_patterns, "config files or globs")
        ->required();
    table->add_option("--out", table_out, "output CSV path");

    ProfileArgs pa;
    auto* profile =
        app.add_subcommand("profile", "dump a closed-form profile to CSV");
    profile->add_option("name", pa.name,
                        "h_s | h_infty | barenblatt | wave_f | wave_F")
        ->required();
    profile->add_option("--p", pa.params.p, "diffusion exponent");
    profile->add_option("--q", pa.params.q, "source exponent");
    profile->add_option("--N", pa.params.N, "dimension");
    profile->add_option("--M", pa.M, "profile amplitude");
    profile->add_option("--t", pa.t, "evaluation time");
    profile->add_option("--mass", pa.mass, "source-solution mass");
    profile->add_option("--r-max", pa.r_max, "radial extent");
    profile->add_option("--n", pa.n, "number of nodes");
    profile->add_option("--y-min", pa.y_min, "wave tabulation depth (< 0)");
    profile->add_option("--tol", pa.tol, "wave solve tolerance");
    profile->add_option("--out", pa.out, "output CSV path");

    try {
        app.parse(argc, argv);
        if (*run) return cmd_run(run_config, run_out);
        if (*verify) return cmd_verify(verify_series);
        if (*table) return cmd_table(table_patterns, table_out);
        return cmd_profile(pa);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const domain_error& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
