// Experiment runner: INI-style configs ("section.key = value"), deterministic
// CSV artifacts, plaintext verdict report. Artifacts per run directory:
//   series.csv    t,sup_norm,grad_sup,l1_norm,min_plap,support_radius
//   snapshot_<t>.csv   r,u        (one per snapshot)
//   rescaled_<tau>.csv y,v        (one per snapshot)
//   balance.csv   t,source_integral    (mass-balance accumulator)
//   meta.ini      config echo + initial-data facts (lets `verify` rebuild
//                 the report from artifacts alone)
//   report.txt    convergence report + one line per check
// All numeric output uses shortest round-trip formatting; every file is
// written to a temp name and renamed, so reruns are byte-identical and no
// partial artifact is ever visible.
#pragma once

#include "hjlab/diagnostics.hpp"
#include "hjlab/format.hpp"
#include "hjlab/params.hpp"
#include "hjlab/rescaler.hpp"
#include "hjlab/solver.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace hjlab {

enum class ICKind { Bump, Tent, Barenblatt, CustomCsv };

struct ExperimentConfig {
    Params params;
    RadialGrid grid;
    SolverConfig solver;

    ICKind ic_kind = ICKind::Bump;
    double ic_amplitude = 1.0; // bump/tent height A
    double ic_radius = 1.0;    // support radius R0
    double ic_mass = 1.0;      // barenblatt mass L (profile taken at t = 1)
    std::string ic_csv_path;   // custom-csv source

    double T = 10.0;
    std::vector<double> snapshot_times; // explicit list wins if non-empty
    int snapshot_count = 12;
    bool geometric_spacing = true;
    double t_first = 1.0; // first positive snapshot for generated schedules

    double rescale_y_max = -1.0; // < 0: auto from sup0
    int rescale_ny = 1201;
    double tail_fraction = 0.5;

    std::filesystem::path output_dir;
};

// Parses "section.key = value" lines; '#' starts a comment; unknown keys and
// out-of-domain values raise config_error.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text,
                                   const std::filesystem::path& base_dir);

// Initial condition sampled on the configured grid.
//   bump: A (1 - (r/R0)^2)_+^2   tent: A (1 - r/R0)_+
//   barenblatt: B_L(1, r)        custom-csv: "r,u" resampled linearly
RadialField make_initial_condition(const ExperimentConfig& config);

struct ExperimentOutcome {
    bool checks_passed = true;
    std::vector<CheckResult> checks;
    ConvergenceReport report;
    TimeSeries series;
    std::vector<std::string> warnings;
};

// Full pipeline: evolve, rescale every snapshot, estimate M_infty, run all
// checks, write artifacts. Artifacts are written even when checks fail
// (the CLI maps that outcome to its own exit code).
ExperimentOutcome run_experiment(const ExperimentConfig& config);

// Re-runs diagnostics from a stored run directory (the directory containing
// series.csv) and rebuilds the report text. `lines` receives the rebuilt
// report; returns true iff it matches report.txt on disk byte-for-byte.
bool verify_run(const std::filesystem::path& series_csv, std::string& rebuilt,
                std::string& stored);

// Aggregates final-state numbers across stored runs into table.csv rows.
struct TableRow {
    std::string config;
    double dr;
    double final_t;
    double M_est;
    double final_profile_error;
    int checks_failed;
};
std::vector<TableRow> aggregate_runs(const std::vector<std::filesystem::path>& configs);

// --- deterministic IO helpers --------------------------------------------

void atomic_write(const std::filesystem::path& path, const std::string& content);
void write_csv(const std::filesystem::path& path, const std::string& header,
               const std::vector<std::pair<double, double>>& rows);
std::vector<std::pair<double, double>> read_two_column_csv(
    const std::filesystem::path& path);

std::string render_report(const ConvergenceReport& report,
                          const RegimeReport& regime,
                          const std::vector<CheckResult>& checks,
                          const std::vector<std::string>& warnings);

} // namespace hjlab
