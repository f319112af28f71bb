// Experiment runner tests: config parsing with its error surface, initial
// condition construction, deterministic artifact round-trips, and the
// verify/aggregate tooling on real (miniature) runs.
#include <doctest.h>

#include "hjlab/experiment.hpp"
#include "hjlab/params.hpp"
#include "hjlab/profiles.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace hjlab;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("hjlab_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A config whose full pipeline takes well under a second.
std::string micro_config(const std::string& out_name) {
    return "params.p = 3\n"
           "params.q = 2\n"
           "grid.r_max = 4\n"
           "grid.n = 201\n"
           "solver.epsilon = 0.01\n"
           "ic.kind = bump\n"
           "ic.amplitude = 1\n"
           "ic.radius = 1\n"
           "schedule.T = 4\n"
           "schedule.times = 0, 0.5, 1, 2, 4\n"
           "rescale.ny = 301\n"
           "output_dir = " +
           out_name + "\n";
}

} // namespace

TEST_CASE("config parsing: full key set and defaults") {
    const fs::path base = fresh_dir("parse");
    const std::string text =
        "# comment line\n"
        "params.p = 3.5        # trailing comment\n"
        "params.q = 2.2\n"
        "params.N = 2\n"
        "grid.r_max = 12.5\n"
        "grid.n = 1001\n"
        "solver.epsilon = 0.05\n"
        "solver.cfl_safety = 0.8\n"
        "solver.pure_diffusion = true\n"
        "solver.support_threshold = 1e-9\n"
        "solver.lipschitz_bound = 2.5\n"
        "ic.kind = tent\n"
        "ic.amplitude = 0.7\n"
        "ic.radius = 1.4\n"
        "ic.mass = 2\n"
        "schedule.T = 50\n"
        "schedule.snapshot_count = 9\n"
        "schedule.spacing = linear\n"
        "schedule.t_first = 0.5\n"
        "rescale.y_max = 6\n"
        "rescale.ny = 501\n"
        "rescale.tail_fraction = 0.25\n"
        "output_dir = runs/my_run\n";
    const ExperimentConfig c = parse_config_text(text, base);
    CHECK(c.params.p == 3.5);
    CHECK(c.params.q == 2.2);
    CHECK(c.params.N == 2);
    CHECK(c.grid.r_max == 12.5);
    CHECK(c.grid.n == 1001);
    CHECK(c.solver.epsilon == 0.05);
    CHECK(c.solver.cfl_safety == 0.8);
    CHECK(c.solver.pure_diffusion);
    CHECK(c.solver.support_threshold == 1e-9);
    CHECK(c.solver.lipschitz_bound == 2.5);
    CHECK(c.ic_kind == ICKind::Tent);
    CHECK(c.ic_amplitude == 0.7);
    CHECK(c.ic_radius == 1.4);
    CHECK(c.ic_mass == 2.0);
    CHECK(c.T == 50.0);
    CHECK(c.snapshot_count == 9);
    CHECK_FALSE(c.geometric_spacing);
    CHECK(c.t_first == 0.5);
    CHECK(c.rescale_y_max == 6.0);
    CHECK(c.rescale_ny == 501);
    CHECK(c.tail_fraction == 0.25);
    CHECK(c.output_dir == base / "runs/my_run");

    const ExperimentConfig d = parse_config_text("params.p = 3\n", base);
    CHECK(d.params.q == 2.0);
    CHECK(d.ic_kind == ICKind::Bump);
    CHECK(d.snapshot_count == 12);
    CHECK(d.geometric_spacing);
    CHECK(d.output_dir == base / "run_out");
}

TEST_CASE("config parsing: the error surface") {
    const fs::path base = fs::temp_directory_path();
    auto bad = [&](const std::string& text) {
        CHECK_THROWS_AS(parse_config_text(text, base), config_error);
    };
    bad("params.frobnicate = 1\n");          // unknown key
    bad("params.p\n");                       // missing '='
    bad("params.p = \n");                    // empty value
    bad("params.p = abc\n");                 // not a number
    bad("params.p = 3 extra\n");             // trailing garbage
    bad("grid.n = 2.5\n");                   // not an integer
    bad("solver.pure_diffusion = maybe\n");  // not a bool
    bad("ic.kind = blob\n");                 // unknown kind
    bad("params.p = 2\n");                   // p out of domain
    bad("params.q = 1\n");                   // q out of domain
    bad("solver.epsilon = 1\n");             // epsilon out of [0, 1)
    bad("ic.amplitude = 0\n");
    bad("ic.radius = -1\n");
    bad("ic.kind = custom-csv\n");           // no csv path
    bad("schedule.T = -1\n");
    bad("schedule.times = 2, 1\n" "schedule.T = 4\n");
    bad("schedule.times = 1, 5\n" "schedule.T = 4\n");
    bad("schedule.times = 1,, 2\n" "schedule.T = 4\n");
    bad("schedule.snapshot_count = 0\n");
    bad("schedule.t_first = 0\n");
    bad("schedule.spacing = random\n");
    bad("rescale.ny = 1\n");
    bad("rescale.tail_fraction = 0\n");
    bad("rescale.tail_fraction = 1.5\n");
}

TEST_CASE("initial condition shapes") {
    const fs::path base = fresh_dir("ic");
    ExperimentConfig c = parse_config_text(
        "grid.r_max = 2\n"
        "grid.n = 101\n"
        "ic.amplitude = 1.5\n"
        "ic.radius = 0.8\n",
        base);

    SUBCASE("bump") {
        c.ic_kind = ICKind::Bump;
        const RadialField f = make_initial_condition(c);
        for (int i = 0; i < 101; ++i) {
            const double r = f.grid.node(i);
            const double s = 1.0 - (r / 0.8) * (r / 0.8);
            const double want = s > 0.0 ? 1.5 * s * s : 0.0;
            CHECK(f.u[i] == Approx(want).scale(1).epsilon(1e-15));
        }
        CHECK(f.u[0] == 1.5);
        CHECK(f.u[100] == 0.0);
    }

    SUBCASE("tent") {
        c.ic_kind = ICKind::Tent;
        const RadialField f = make_initial_condition(c);
        CHECK(f.u[0] == 1.5);
        CHECK(f.u[20] == Approx(1.5 * 0.5).epsilon(1e-14)); // r = 0.4
        CHECK(f.u[40] == 0.0);                              // r = 0.8 (edge)
    }

    SUBCASE("barenblatt matches the profile evaluator") {
        c.ic_kind = ICKind::Barenblatt;
        c.ic_mass = 1.0;
        const RadialField f = make_initial_condition(c);
        for (int i = 0; i < 101; i += 7) {
            CHECK(f.u[i] ==
                  eval_barenblatt(1.0, f.grid.node(i), 1.0, c.params));
        }
    }

    SUBCASE("custom csv resamples linearly and reads zero beyond the data") {
        const fs::path csv = base / "ic.csv";
        atomic_write(csv, "r,u\n0,1\n0.5,0.6\n1.0,0\n");
        c.ic_kind = ICKind::CustomCsv;
        c.ic_csv_path = csv.string();
        const RadialField f = make_initial_condition(c);
        CHECK(f.u[0] == Approx(1.0).epsilon(1e-15));
        CHECK(f.u[10] == Approx(0.84).epsilon(1e-14)); // r = 0.2
        CHECK(f.u[25] == Approx(0.6).epsilon(1e-14));  // r = 0.5
        CHECK(f.u[75] == 0.0);                         // r = 1.5
    }

    SUBCASE("custom csv validation") {
        c.ic_kind = ICKind::CustomCsv;
        c.ic_csv_path = (base / "absent.csv").string();
        CHECK_THROWS_AS(make_initial_condition(c), config_error);
        atomic_write(base / "dec.csv", "r,u\n0,1\n0.5,0.6\n0.4,0\n");
        c.ic_csv_path = (base / "dec.csv").string();
        CHECK_THROWS_AS(make_initial_condition(c), config_error);
        atomic_write(base / "neg.csv", "r,u\n0,1\n0.5,-0.6\n1,0\n");
        c.ic_csv_path = (base / "neg.csv").string();
        CHECK_THROWS_AS(make_initial_condition(c), config_error);
    }
}

TEST_CASE("atomic write and two-column csv round trip") {
    const fs::path base = fresh_dir("io");
    const fs::path p = base / "x.csv";
    atomic_write(p, "a,b\n1,2\n");
    CHECK(slurp(p) == "a,b\n1,2\n");
    atomic_write(p, "a,b\n3,4\n"); // overwrite is atomic, no temp leftovers
    CHECK(slurp(p) == "a,b\n3,4\n");
    int entries = 0;
    for (const auto& e : fs::directory_iterator(base)) {
        (void)e;
        ++entries;
    }
    CHECK(entries == 1);

    std::vector<std::pair<double, double>> rows = {{0.5, 1.25}, {2.0, -3.5}};
    write_csv(p, "t,v", rows);
    const auto back = read_two_column_csv(p);
    REQUIRE(back.size() == 2);
    CHECK(back[0].first == 0.5);
    CHECK(back[0].second == 1.25);
    CHECK(back[1].first == 2.0);
    CHECK(back[1].second == -3.5);
}

TEST_CASE("a miniature run produces the full artifact set and verifies") {
    const fs::path base = fresh_dir("run");
    const ExperimentConfig cfg = parse_config_text(micro_config("out_a"), base);
    const ExperimentOutcome out = run_experiment(cfg);

    CHECK(out.checks_passed);
    REQUIRE(out.checks.size() == 10);
    CHECK(out.series.size() == 5);

    const fs::path dir = base / "out_a";
    for (const char* name :
         {"series.csv", "balance.csv", "errors.csv", "meta.ini", "report.txt"}) {
        INFO(name);
        CHECK(fs::exists(dir / name));
    }
    int snaps = 0, rescaled = 0;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string n = e.path().filename().string();
        if (n.rfind("snapshot_", 0) == 0) ++snaps;
        if (n.rfind("rescaled_", 0) == 0) ++rescaled;
    }
    CHECK(snaps == 5);
    CHECK(rescaled == 5);

    const std::string report = slurp(dir / "report.txt");
    CHECK(report.find("regime = A1") != std::string::npos);
    CHECK(report.find("checks_passed = true") != std::string::npos);
    CHECK(report.find("CHK-MAXP PASS") != std::string::npos);
    CHECK(report.find("CHK-DECAY SKIPPED") != std::string::npos);

    // series.csv: header + one row per snapshot time.
    std::istringstream series(slurp(dir / "series.csv"));
    std::string line;
    int lines = 0;
    while (std::getline(series, line)) ++lines;
    CHECK(lines == 6);

    // verify agrees with the stored report...
    std::string rebuilt, stored;
    CHECK(verify_run(dir / "series.csv", rebuilt, stored));
    CHECK(rebuilt == stored);

    // ...and notices a tampered artifact.
    atomic_write(dir / "report.txt", report + "tail\n");
    CHECK_FALSE(verify_run(dir / "series.csv", rebuilt, stored));
}

TEST_CASE("reruns are byte-identical") {
    const fs::path base = fresh_dir("determinism");
    const ExperimentConfig a = parse_config_text(micro_config("out_a"), base);
    const ExperimentConfig b = parse_config_text(micro_config("out_b"), base);
    run_experiment(a);
    run_experiment(b);
    for (const char* name :
         {"series.csv", "balance.csv", "errors.csv", "meta.ini", "report.txt"}) {
        INFO(name);
        CHECK(slurp(base / "out_a" / name) == slurp(base / "out_b" / name));
    }
}

TEST_CASE("aggregate rows summarize stored runs") {
    const fs::path base = fresh_dir("aggregate");
    const fs::path cfg_path = base / "micro.cfg";
    atomic_write(cfg_path, micro_config("out_a"));
    run_experiment(parse_config(cfg_path));

    const auto rows = aggregate_runs({cfg_path});
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].config == "micro.cfg");
    CHECK(rows[0].dr == Approx(0.02).epsilon(1e-14));
    CHECK(rows[0].final_t == 4.0);
    CHECK(rows[0].checks_failed == 0);
    CHECK(rows[0].final_profile_error > 0.0);
    CHECK(rows[0].M_est >= 0.0);
}

TEST_CASE("generated schedules reach T exactly") {
    const fs::path base = fs::temp_directory_path();
    // Geometric: {0} + t_first * ratio^{k/(K-1)} ending exactly at T.
    ExperimentConfig g = parse_config_text(
        "schedule.T = 100\n"
        "schedule.snapshot_count = 3\n"
        "schedule.t_first = 1\n"
        "grid.r_max = 2\n"
        "grid.n = 51\n"
        "schedule.times = 0, 1, 10, 100\n",
        base);
    CHECK(g.snapshot_times == std::vector<double>{0.0, 1.0, 10.0, 100.0});

    // The implicit schedule is exercised through a real run: T = 2, 3 counts.
    const fs::path dir = fresh_dir("schedule");
    ExperimentConfig c = parse_config_text(
        "grid.r_max = 3\n"
        "grid.n = 61\n"
        "schedule.T = 2\n"
        "schedule.snapshot_count = 3\n"
        "schedule.t_first = 0.5\n"
        "rescale.ny = 101\n"
        "output_dir = sched_out\n",
        dir);
    const ExperimentOutcome out = run_experiment(c);
    REQUIRE(out.series.size() == 4); // {0} + 3 geometric points
    CHECK(out.series[0].t == 0.0);
    CHECK(out.series[1].t == 0.5);
    CHECK(out.series[2].t == 1.0); // 0.5 * (2/0.5)^{1/2}
    CHECK(out.series[3].t == 2.0);
}
