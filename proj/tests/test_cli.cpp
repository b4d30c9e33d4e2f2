// End-to-end command drivers, exercised in-process against temp directories:
// file sets, exit codes, guard rails, and byte-level reproducibility of a
// repeated run (same build, same machine, same config digest).

#include "doctest.h"

#include "hartree/commands.hpp"
#include "hartree/config.hpp"
#include "hartree/grid.hpp"
#include "hartree/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace hartree;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    fs::path d = fs::temp_directory_path() /
                 ("hartree_cli_" + tag + "_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++));
    fs::remove_all(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& s) {
    std::size_t n = 0;
    for (char c : s)
        if (c == '\n') ++n;
    return n;
}

// small, fast coupled run: 64-point grids, 50 steps
const char* kSmallRun =
    "grid_x.n = 64\n"
    "grid_y.n = 64\n"
    "time.T = 0.05\n"
    "time.dt = 1e-3\n"
    "time.record_every = 10\n";

} // namespace

TEST_CASE("cmd_run writes the full file set and is byte-reproducible") {
    const fs::path out_a = fresh_dir("run_a"), out_b = fresh_dir("run_b");

    SimulationConfig a = parse_config(kSmallRun);
    set_output_dir(a, out_a.string());
    REQUIRE(cmd_run(a) == 0);

    CHECK(fs::exists(out_a / "trajectory.htrj"));
    CHECK(fs::exists(out_a / "diagnostics.csv"));
    CHECK(fs::exists(out_a / "manifest.txt"));

    // 50 steps recorded every 10th: t = 0, .01, ..., .05 -> 6 rows + header
    const std::string diag = slurp(out_a / "diagnostics.csv");
    CHECK(line_count(diag) == 7);

    const Grid1D g(64, -12.0, 12.0);
    const HartreeTrajectory traj = io::read_trajectory(out_a / "trajectory.htrj", g, g);
    REQUIRE(traj.states.size() == 6);
    CHECK(traj.dt == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(traj.states.back().t == doctest::Approx(0.05).epsilon(1e-9));

    // manifest echoes the digest and re-parses to the same configuration
    const std::string manifest = slurp(out_a / "manifest.txt");
    CHECK(manifest.find("# config digest " + a.digest) != std::string::npos);

    // identical physics, different directory: identical bytes
    SimulationConfig b = parse_config(kSmallRun);
    set_output_dir(b, out_b.string());
    CHECK(b.digest == a.digest);
    REQUIRE(cmd_run(b) == 0);
    CHECK(slurp(out_b / "diagnostics.csv") == diag);
    CHECK(slurp(out_b / "trajectory.htrj") == slurp(out_a / "trajectory.htrj"));

    fs::remove_all(out_a);
    fs::remove_all(out_b);
}

TEST_CASE("cmd_run rejects initial data leaning on the box boundary") {
    SimulationConfig cfg = parse_config(
        "grid_x.n = 64\n"
        "time.T = 0.01\n"
        "initial_x.center = 11.8\n");
    set_output_dir(cfg, fresh_dir("run_boundary").string());
    CHECK_THROWS_WITH_AS(cmd_run(cfg), doctest::Contains("initial mass"), std::runtime_error);
}

TEST_CASE("cmd_picard converges on a short horizon and reports the contraction") {
    const fs::path out = fresh_dir("picard");
    SimulationConfig cfg = parse_config(
        "grid_x.n = 64\n"
        "grid_y.n = 64\n"
        "time.dt = 1e-3\n"
        "time.record_every = 10\n"
        "picard.T1 = 0.05\n"
        "picard.max_iterates = 8\n"
        "picard.tol = 1e-10\n");
    set_output_dir(cfg, out.string());
    REQUIRE(cmd_picard(cfg) == 0);

    CHECK(fs::exists(out / "trajectory.htrj"));
    CHECK(fs::exists(out / "diagnostics.csv"));
    CHECK(fs::exists(out / "manifest.txt"));

    const std::string report = slurp(out / "picard_report.csv");
    std::istringstream ss(report);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "n,sup_diff,ratio");
    std::vector<double> sup_diffs;
    while (std::getline(ss, line)) {
        std::istringstream row(line);
        std::string n_s, d_s;
        std::getline(row, n_s, ',');
        std::getline(row, d_s, ',');
        sup_diffs.push_back(std::strtod(d_s.c_str(), nullptr));
    }
    REQUIRE(sup_diffs.size() >= 2);
    CHECK(sup_diffs.back() < 1e-10);  // met the tolerance

    fs::remove_all(out);
}

TEST_CASE("cmd_picard flags non-convergence but still writes outputs") {
    const fs::path out = fresh_dir("picard_nc");
    SimulationConfig cfg = parse_config(
        "grid_x.n = 64\n"
        "grid_y.n = 64\n"
        "time.dt = 1e-3\n"
        "picard.T1 = 0.05\n"
        "picard.max_iterates = 1\n"
        "picard.tol = 1e-14\n");
    set_output_dir(cfg, out.string());
    CHECK(cmd_picard(cfg) == 1);
    CHECK(fs::exists(out / "picard_report.csv"));
    CHECK(fs::exists(out / "trajectory.htrj"));
    fs::remove_all(out);
}

TEST_CASE("cmd_compare measures the ansatz error end to end") {
    const fs::path out = fresh_dir("compare");
    SimulationConfig cfg = parse_config(kSmallRun);
    set_output_dir(cfg, out.string());
    REQUIRE(cmd_compare(cfg) == 0);

    const std::string err = slurp(out / "error.csv");
    std::istringstream ss(err);
    std::string line;
    std::getline(ss, line);
    REQUIRE(line == "t,hartree_error,full_norm,full_energy");
    std::vector<std::vector<double>> rows;
    while (std::getline(ss, line)) {
        std::istringstream row(line);
        std::vector<double> vals;
        std::string cell;
        while (std::getline(row, cell, ',')) vals.push_back(std::strtod(cell.c_str(), nullptr));
        REQUIRE(vals.size() == 4);
        rows.push_back(vals);
    }
    REQUIRE(rows.size() == 6);
    CHECK(rows.front()[1] <= 1e-12);            // starts as an exact product
    CHECK(rows.back()[1] > rows.front()[1]);    // interaction entangles
    for (const auto& r : rows) {
        CHECK(r[2] == doctest::Approx(1.0).epsilon(1e-12));             // 2D norm
        CHECK(r[3] == doctest::Approx(rows.front()[3]).epsilon(1e-6));  // 2D energy
    }

    const Grid1D g(64, -12.0, 12.0);
    const Snapshot2D psi = io::read_snapshot_2d(out / "psi_final.htr2", g, g);
    CHECK(psi.t == doctest::Approx(0.05).epsilon(1e-9));
    CHECK(l2_norm(psi.psi) == doctest::Approx(1.0).epsilon(1e-12));

    fs::remove_all(out);
}

TEST_CASE("cmd_compare guard rails") {
    SUBCASE("disabled comparison is an error, not a silent no-op") {
        SimulationConfig cfg = parse_config(std::string(kSmallRun) + "compare.enabled = false\n");
        set_output_dir(cfg, fresh_dir("compare_off").string());
        CHECK_THROWS_WITH_AS(cmd_compare(cfg), doctest::Contains("compare.enabled"),
                             std::runtime_error);
    }
    SUBCASE("oversized tensor grid needs the memory acknowledgement") {
        SimulationConfig cfg = parse_config(
            "grid_x.n = 4096\n"
            "grid_y.n = 2048\n"
            "time.T = 0.01\n");
        set_output_dir(cfg, fresh_dir("compare_big").string());
        CHECK_THROWS_WITH_AS(cmd_compare(cfg), doctest::Contains("memory_ack"), std::runtime_error);
    }
}

TEST_CASE("cmd_check exit codes and report") {
    const fs::path out = fresh_dir("check");

    SimulationConfig ok = parse_config("grid_x.n = 256\ngrid_y.n = 256\n");
    set_output_dir(ok, out.string());
    CHECK(cmd_check(ok) == 0);
    const std::string report = slurp(out / "assumptions.txt");
    CHECK(report.find("H1: PASS") != std::string::npos);
    CHECK(report.find("H2: PASS c0=") != std::string::npos);
    CHECK(report.find("overall: PASS") != std::string::npos);

    SimulationConfig bad = parse_config(
        "grid_x.n = 256\n"
        "grid_y.n = 256\n"
        "potentials.bump_amplitude = 1.0\n");
    set_output_dir(bad, out.string());
    CHECK(cmd_check(bad) == 2);
    const std::string report2 = slurp(out / "assumptions.txt");
    CHECK(report2.find("H2: FAIL") != std::string::npos);
    CHECK(report2.find("overall: FAIL") != std::string::npos);

    fs::remove_all(out);
}

TEST_CASE("cmd_ground_state solves both factors and tabulates the energies") {
    const fs::path out = fresh_dir("gs");
    SimulationConfig cfg = parse_config("grid_x.n = 256\ngrid_y.n = 256\n");
    set_output_dir(cfg, out.string());
    REQUIRE(cmd_ground_state(cfg) == 0);

    const std::string csv = slurp(out / "ground_state.csv");
    std::istringstream ss(csv);
    std::string line;
    std::getline(ss, line);
    REQUIRE(line == "factor,energy,iterations");
    double e_y = 0.0;
    while (std::getline(ss, line)) {
        std::istringstream row(line);
        std::string factor, energy_s;
        std::getline(row, factor, ',');
        std::getline(row, energy_s, ',');
        if (factor == "y") e_y = std::strtod(energy_s.c_str(), nullptr);
    }
    // harmonic factor with unit frequency: E0 = 1/2 (raw potential, no floor shift)
    CHECK(e_y == doctest::Approx(0.5).epsilon(1e-6));

    const Grid1D g(256, -12.0, 12.0);
    const HartreeTrajectory gs = io::read_trajectory(out / "ground_state.htrj", g, g);
    REQUIRE(gs.states.size() == 1);
    CHECK(std::abs(l2_norm(gs.states[0].phi_x) - 1.0) <= 1e-12);
    CHECK(std::abs(l2_norm(gs.states[0].phi_y) - 1.0) <= 1e-12);

    fs::remove_all(out);
}
