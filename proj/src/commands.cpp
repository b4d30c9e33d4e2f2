#include "hartree/commands.hpp"

#include "hartree/diagnostics.hpp"
#include "hartree/hartree.hpp"
#include "hartree/io.hpp"
#include "hartree/potentials.hpp"
#include "hartree/propagator.hpp"
#include "hartree/reference.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hartree {

namespace fs = std::filesystem;

namespace {

Grid1D make_grid(const GridConfig& g) { return Grid1D(g.n, g.min, g.max); }

BumpSpec make_bump(const SimulationConfig& cfg) {
    return BumpSpec{cfg.bump_amplitude, cfg.bump_support,
                    cfg.slope_mode == SlopeMode::pure_bump ? BumpShape::pure_bump
                                                           : BumpShape::odd_bump};
}

PotentialSet build_potentials(const SimulationConfig& cfg, const Grid1D& gx, const Grid1D& gy) {
    if (cfg.preset == PotentialPreset::double_well_bump) {
        return PotentialSet::double_well_bump(gx, gy, cfg.ell, cfg.omega, make_bump(cfg),
                                              cfg.coupling == CouplingMode::zero);
    }
    auto v1 = io::load_potential_csv(cfg.v1_csv, gx);
    auto v2 = io::load_potential_csv(cfg.v2_csv, gy);
    Coupling coupling = std::monostate{};
    if (cfg.coupling == CouplingMode::bump) {
        // Same separable interaction chi(x) * y^2 as the preset.
        const BumpSpec bump = make_bump(cfg);
        SeparableCoupling sc;
        sc.fx.reserve(gx.n());
        sc.dfx.reserve(gx.n());
        sc.d2fx.reserve(gx.n());
        for (const double x : gx.points()) {
            sc.fx.push_back(bump_value(bump, x));
            sc.dfx.push_back(bump_derivative(bump, x));
            sc.d2fx.push_back(bump_second_derivative(bump, x));
        }
        sc.gy.reserve(gy.n());
        sc.dgy.reserve(gy.n());
        sc.d2gy.reserve(gy.n());
        for (const double y : gy.points()) {
            sc.gy.push_back(y * y);
            sc.dgy.push_back(2.0 * y);
            sc.d2gy.push_back(2.0);
        }
        coupling = std::move(sc);
    }
    return PotentialSet(gx, gy, std::move(v1), std::move(v2), std::move(coupling));
}

WaveFunction initial_factor(const InitialConfig& ic, const Grid1D& g,
                            const std::vector<double>& v, const SimulationConfig& cfg) {
    if (ic.kind == InitialKind::ground_state) {
        return imaginary_time_ground_state(g, v, cfg.gs_dt_im, cfg.gs_tol, cfg.gs_max_iter).state;
    }
    const double amp = std::pow(std::numbers::pi * ic.width * ic.width, -0.25);
    WaveFunction f = sample(g, [&](double x) {
        const double u = (x - ic.center) / ic.width;
        return amp * std::exp(std::complex<double>(-0.5 * u * u, ic.momentum * x));
    });
    normalize(f);
    return f;
}

struct Setup {
    Grid1D gx, gy;
    PotentialSet floored;  // dynamics always run on unit-floored potentials
    double shift_v1 = 0.0, shift_v2 = 0.0;
    HartreeState initial;
};

void require_contained(const WaveFunction& f, const char* axis, double tol) {
    const double mass = boundary_mass(f);
    if (!(mass < tol)) {
        throw std::runtime_error(std::string("initial mass within 5 grid points of the ") + axis +
                                 " boundary is " + io::format_g17(mass) + " (tolerance " +
                                 io::format_g17(tol) + "); enlarge the box or narrow the data");
    }
}

Setup build_setup(const SimulationConfig& cfg) {
    Grid1D gx = make_grid(cfg.grid_x);
    Grid1D gy = make_grid(cfg.grid_y);
    ShiftResult shifted = shift_to_unit_floor(build_potentials(cfg, gx, gy));
    HartreeState init{0.0,
                      initial_factor(cfg.initial_x, gx, shifted.potentials.v1(), cfg),
                      initial_factor(cfg.initial_y, gy, shifted.potentials.v2(), cfg)};
    require_contained(init.phi_x, "x", cfg.boundary_init_tol);
    require_contained(init.phi_y, "y", cfg.boundary_init_tol);
    return Setup{std::move(gx), std::move(gy), std::move(shifted.potentials),
                 shifted.shift_v1, shifted.shift_v2, std::move(init)};
}

fs::path ensure_outdir(const SimulationConfig& cfg) {
    fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    return dir;
}

void write_manifest(const SimulationConfig& cfg, const fs::path& dir,
                    const std::vector<std::string>& notes = {}) {
    std::ofstream os(dir / "manifest.txt", std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + (dir / "manifest.txt").string());
    os << manifest_text(cfg);
    for (const auto& n : notes) os << "# " << n << '\n';
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + (dir / "manifest.txt").string());
}

std::vector<std::string> shift_notes(const Setup& su) {
    if (su.shift_v1 == 0.0 && su.shift_v2 == 0.0) return {};
    return {"unit-floor shift applied: V1 += " + io::format_g17(su.shift_v1) +
            ", V2 += " + io::format_g17(su.shift_v2)};
}

void warn_boundary(const std::vector<DiagnosticsRecord>& recs, const SimulationConfig& cfg) {
    for (const auto& r : recs) {
        if (r.boundary_mass > cfg.boundary_warn_tol) {
            std::fprintf(stderr,
                         "warning: boundary mass %.3g at t = %.6g exceeds %.3g; "
                         "the box may be too small for this run\n",
                         r.boundary_mass, r.t, cfg.boundary_warn_tol);
            return;
        }
    }
}

// Diagnostics for every stored state; the centered-difference residual needs
// both neighbors, so the first and last rows keep an empty df column.
std::vector<DiagnosticsRecord> trajectory_diagnostics(const HartreeTrajectory& traj,
                                                      const PotentialSet& p, bool with_df) {
    std::vector<DiagnosticsRecord> recs;
    recs.reserve(traj.states.size());
    for (std::size_t m = 0; m < traj.states.size(); ++m) {
        std::optional<double> df;
        if (with_df && m >= 1 && m + 1 < traj.states.size())
            df = dirac_frenkel_residual(traj, p, m);
        recs.push_back(collect_diagnostics(traj.states[m], p, df));
    }
    return recs;
}

HartreeTrajectory subsample(const HartreeTrajectory& traj, std::size_t every) {
    if (every <= 1) return traj;
    HartreeTrajectory out;
    out.dt = traj.dt * static_cast<double>(every);
    out.meta = traj.meta;
    for (std::size_t m = 0; m < traj.states.size(); m += every) out.states.push_back(traj.states[m]);
    return out;
}

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

std::string assumption_text(const AssumptionReport& r, const std::vector<std::string>& notes) {
    using io::format_g17;
    std::string out;
    out += "domain: " + r.domain + "\n";
    for (const auto& n : notes) out += "# " + n + "\n";
    out += "H1: " + pass_fail(r.floor_ok) + " min_V1=" + format_g17(r.min_v1) +
           " min_V2=" + format_g17(r.min_v2) + " (pointwise floor V >= 1)\n";
    out += "H2: " + pass_fail(r.coupling_ok) + " c0=" + format_g17(r.c0) +
           " C=" + format_g17(r.c0_offset) + " (|w| <= c0 (V1 + V2 + C); requires c0 < 1)\n";
    out += "temperance_V1: " + pass_fail(std::isfinite(r.temperance_v1)) +
           " C=" + format_g17(r.temperance_v1) + " (|V1'| <= C (1 + V1))\n";
    out += "temperance_V2: " + pass_fail(std::isfinite(r.temperance_v2)) +
           " C=" + format_g17(r.temperance_v2) + " (|V2'| <= C (1 + V2))\n";
    out += "growth_dx_w: " + pass_fail(r.growth[1].ok) + " c=" + format_g17(r.growth[1].constant) +
           " (|d_x w| <= c (sqrt(V1) + V2 + 1))\n";
    out += "growth_dy_w: " + pass_fail(r.growth[2].ok) + " c=" + format_g17(r.growth[2].constant) +
           " (|d_y w| <= c (V1 + sqrt(V2) + 1))\n";
    out += "growth_lap_w: " + pass_fail(r.growth[3].ok) + " c=" + format_g17(r.growth[3].constant) +
           " (|d_xx w| + |d_yy w| <= c (V1 + V2 + 1))\n";
    out += "overall: " + pass_fail(r.all_ok) + "\n";
    return out;
}

} // namespace

int cmd_run(const SimulationConfig& cfg) {
    Setup su = build_setup(cfg);
    const fs::path dir = ensure_outdir(cfg);

    HartreeTrajectory traj = run_hartree(su.initial, su.floored, cfg.T, cfg.dt, cfg.record_every);
    traj.meta = cfg.digest;

    const auto recs = trajectory_diagnostics(traj, su.floored, cfg.df_residual);
    warn_boundary(recs, cfg);
    io::write_trajectory(dir / "trajectory.htrj", traj);
    io::write_diagnostics_csv(dir / "diagnostics.csv", recs);
    write_manifest(cfg, dir, shift_notes(su));

    double drift = 0.0;
    for (const auto& r : recs) drift = std::max(drift, std::abs(r.energy - recs.front().energy));
    std::printf("run: %zu states recorded over T = %s, max energy drift %.3g -> %s\n",
                recs.size(), io::format_g17(cfg.T).c_str(), drift, dir.string().c_str());
    return 0;
}

int cmd_picard(const SimulationConfig& cfg) {
    Setup su = build_setup(cfg);
    const fs::path dir = ensure_outdir(cfg);

    PicardOptions opt;
    opt.T1 = cfg.picard_T1;
    opt.dt = cfg.dt;
    opt.max_iterates = cfg.picard_max_iterates;
    opt.tol = cfg.picard_tol;
    opt.seed = cfg.picard_seed == PicardSeedMode::free_flow ? PicardSeed::free_flow
                                                            : PicardSeed::frozen_initial;
    opt.midpoint_averages = cfg.picard_averages == PicardAverages::midpoint;
    opt.storage_limit_mb = cfg.picard_storage_limit_mb;

    auto [traj, report] = picard_solve(su.initial, su.floored, opt);
    PicardReport combined = report;  // sup_diffs concatenated across segments
    for (std::size_t seg = 1; seg < cfg.picard_segments; ++seg) {
        auto [next, seg_report] = continue_picard(traj, report, su.floored, opt);
        traj = std::move(next);
        report = std::move(seg_report);
        combined.iterates += report.iterates;
        combined.sup_diffs.insert(combined.sup_diffs.end(), report.sup_diffs.begin(),
                                  report.sup_diffs.end());
        combined.converged = report.converged;
    }
    traj.meta = cfg.digest;

    const HartreeTrajectory recorded = subsample(traj, cfg.record_every);
    const auto recs = trajectory_diagnostics(recorded, su.floored, cfg.df_residual);
    warn_boundary(recs, cfg);
    io::write_trajectory(dir / "trajectory.htrj", recorded);
    io::write_diagnostics_csv(dir / "diagnostics.csv", recs);
    io::write_picard_csv(dir / "picard_report.csv", combined);
    write_manifest(cfg, dir, shift_notes(su));

    const double last = combined.sup_diffs.empty() ? 0.0 : combined.sup_diffs.back();
    std::printf("picard: %zu updates over %zu segment(s), last sup-diff %.3g (%s) -> %s\n",
                combined.iterates, cfg.picard_segments, last,
                combined.converged ? "converged" : "NOT converged", dir.string().c_str());
    if (!combined.converged) {
        std::fprintf(stderr,
                     "picard did not reach tol = %.3g within %zu updates; "
                     "outputs were still written\n",
                     cfg.picard_tol, cfg.picard_max_iterates);
        return 1;
    }
    return 0;
}

int cmd_compare(const SimulationConfig& cfg) {
    if (!cfg.compare_enabled)
        throw std::runtime_error("compare.enabled = false; enable it to run the 2D reference solve");
    Setup su = build_setup(cfg);
    const std::size_t points = su.gx.n() * su.gy.n();
    if (points > kMax2DPoints && !cfg.compare_memory_ack)
        throw std::runtime_error(
            "2D grid has " + std::to_string(points) + " points, above the " +
            std::to_string(kMax2DPoints) +
            "-point memory guard; set compare.memory_ack = true to proceed");
    const fs::path dir = ensure_outdir(cfg);

    HartreePropagator mean_field(su.floored, cfg.dt);
    FullPropagator2D full(su.floored, cfg.dt, cfg.compare_memory_ack);
    Field2D psi = product_state(su.initial.phi_x, su.initial.phi_y);
    HartreeState s = su.initial;

    std::vector<io::ErrorRow> rows;
    std::vector<DiagnosticsRecord> recs;  // boundary warning only
    auto record = [&] {
        rows.push_back({s.t, hartree_error(psi, s), l2_norm(psi), full.energy(psi)});
        recs.push_back(collect_diagnostics(s, su.floored));
    };
    record();
    const std::size_t steps = step_count(cfg.T, cfg.dt);
    for (std::size_t m = 1; m <= steps; ++m) {
        mean_field.step(s);
        full.step(psi);
        if (has_nan(psi))
            throw std::runtime_error("2D reference turned non-finite at t = " +
                                     io::format_g17(static_cast<double>(m) * cfg.dt));
        if (m % cfg.record_every == 0) record();
    }
    warn_boundary(recs, cfg);

    io::write_error_csv(dir / "error.csv", rows);
    io::write_snapshot_2d(dir / "psi_final.htr2", Snapshot2D{s.t, std::move(psi)});
    write_manifest(cfg, dir, shift_notes(su));

    std::printf("compare: %zu sampled times, final mean-field error %.6g -> %s\n", rows.size(),
                rows.back().hartree_error, dir.string().c_str());
    return 0;
}

int cmd_check(const SimulationConfig& cfg) {
    Grid1D gx = make_grid(cfg.grid_x);
    Grid1D gy = make_grid(cfg.grid_y);
    ShiftResult shifted = shift_to_unit_floor(build_potentials(cfg, gx, gy));
    const AssumptionReport report = check_assumptions(shifted.potentials, cfg.check_offsets);

    std::vector<std::string> notes;
    if (shifted.shift_v1 != 0.0 || shifted.shift_v2 != 0.0)
        notes.push_back("unit-floor shift applied: V1 += " + io::format_g17(shifted.shift_v1) +
                        ", V2 += " + io::format_g17(shifted.shift_v2));
    const std::string text = assumption_text(report, notes);

    const fs::path dir = ensure_outdir(cfg);
    {
        std::ofstream os(dir / "assumptions.txt", std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + (dir / "assumptions.txt").string());
        os << text;
        os.flush();
        if (!os) throw std::runtime_error("write failed: " + (dir / "assumptions.txt").string());
    }
    write_manifest(cfg, dir, notes);
    std::fputs(text.c_str(), stdout);
    return report.all_ok ? 0 : 2;
}

int cmd_ground_state(const SimulationConfig& cfg) {
    Grid1D gx = make_grid(cfg.grid_x);
    Grid1D gy = make_grid(cfg.grid_y);
    // Energies are reported for the potentials as configured; the unit-floor
    // shift would only move them by the added constants.
    const PotentialSet raw = build_potentials(cfg, gx, gy);
    const auto rx = imaginary_time_ground_state(gx, raw.v1(), cfg.gs_dt_im, cfg.gs_tol,
                                                cfg.gs_max_iter);
    const auto ry = imaginary_time_ground_state(gy, raw.v2(), cfg.gs_dt_im, cfg.gs_tol,
                                                cfg.gs_max_iter);

    const fs::path dir = ensure_outdir(cfg);
    HartreeTrajectory traj{{HartreeState{0.0, rx.state, ry.state}}, 0.0, cfg.digest};
    io::write_trajectory(dir / "ground_state.htrj", traj);
    {
        std::ofstream os(dir / "ground_state.csv", std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + (dir / "ground_state.csv").string());
        os << "factor,energy,iterations\n";
        os << "x," << io::format_g17(rx.energy) << ',' << rx.iterations << '\n';
        os << "y," << io::format_g17(ry.energy) << ',' << ry.iterations << '\n';
        os.flush();
        if (!os) throw std::runtime_error("write failed: " + (dir / "ground_state.csv").string());
    }
    write_manifest(cfg, dir);

    if (boundary_mass(rx.state) > cfg.boundary_warn_tol ||
        boundary_mass(ry.state) > cfg.boundary_warn_tol)
        std::fprintf(stderr, "warning: ground state carries boundary mass above %.3g; "
                             "the box may be too small\n", cfg.boundary_warn_tol);

    std::printf("ground-state: E_x = %s (%zu sweeps), E_y = %s (%zu sweeps) -> %s\n",
                io::format_g17(rx.energy).c_str(), rx.iterations,
                io::format_g17(ry.energy).c_str(), ry.iterations, dir.string().c_str());
    return 0;
}

} // namespace hartree
