#include "hartree/hartree.hpp"

#include "hartree/kernels.hpp"

#include <cmath>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <string>

namespace hartree {

std::size_t step_count(double T, double dt) {
    if (!(T >= 0.0) || !std::isfinite(T)) throw std::invalid_argument("T must be finite and >= 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be finite and > 0");
    if (T == 0.0) return 0;
    double q = T / dt;
    // floor with a relative nudge so T divisible by dt up to rounding does not
    // lose its last step (1/1e-3 = 999.999...).
    return static_cast<std::size_t>(std::floor(q + 1e-9 * std::max(1.0, q)));
}

namespace {

void check_state_grids(const HartreeState& s, const PotentialSet& p, const char* who) {
    if (!(s.phi_x.grid == p.grid_x()) || !(s.phi_y.grid == p.grid_y())) {
        throw std::invalid_argument(std::string(who) + ": state grids do not match potential grids");
    }
}

} // namespace

HartreePropagator::HartreePropagator(const PotentialSet& p, double dt)
    : p_(p),
      plan_x_(make_step_plan(p.grid_x(), dt)),
      plan_y_(make_step_plan(p.grid_y(), dt)),
      rho_x_(p.grid_x().n()), rho_y_(p.grid_y().n()),
      vtot_x_(p.grid_x().n()), vtot_y_(p.grid_y().n())
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("HartreePropagator needs dt > 0");
    }
}

void HartreePropagator::step(HartreeState& s) {
    check_state_grids(s, p_, "hartree_step");
    apply_half_kinetic(s.phi_x, plan_x_);
    apply_half_kinetic(s.phi_y, plan_y_);

    density(s.phi_x, rho_x_);
    density(s.phi_y, rho_y_);
    p_.averaged_over_y(rho_y_, vtot_x_);  // <w>_y on the x grid
    p_.averaged_over_x(rho_x_, vtot_y_);  // <w>_x on the y grid
    for (std::size_t i = 0; i < vtot_x_.size(); ++i) vtot_x_[i] += p_.v1()[i];
    for (std::size_t j = 0; j < vtot_y_.size(); ++j) vtot_y_[j] += p_.v2()[j];

    apply_potential_phase(s.phi_x, vtot_x_, plan_x_.dt);
    apply_potential_phase(s.phi_y, vtot_y_, plan_y_.dt);

    apply_half_kinetic(s.phi_x, plan_x_);
    apply_half_kinetic(s.phi_y, plan_y_);
    s.t += plan_x_.dt;

    if (has_nan(s.phi_x) || has_nan(s.phi_y)) {
        throw std::runtime_error("coupled step produced non-finite values at t = " +
                                 std::to_string(s.t));
    }
}

HartreeState hartree_step(const HartreeState& s, double dt, const PotentialSet& p) {
    HartreePropagator prop(p, dt);
    HartreeState out = s;
    prop.step(out);
    return out;
}

HartreeTrajectory run_hartree(const HartreeState& initial, const PotentialSet& p,
                              double T, double dt, std::size_t record_every) {
    check_state_grids(initial, p, "run_hartree");
    if (record_every == 0) throw std::invalid_argument("record_every must be >= 1");
    std::size_t steps = step_count(T, dt);

    HartreeTrajectory traj;
    traj.dt = dt * static_cast<double>(record_every);
    traj.states.reserve(steps / record_every + 1);
    traj.states.push_back(initial);

    if (steps == 0) return traj;

    HartreePropagator prop(p, dt);
    HartreeState s = initial;
    for (std::size_t m = 1; m <= steps; ++m) {
        prop.step(s);
        if (m % record_every == 0) traj.states.push_back(s);
    }
    return traj;
}

namespace {

// ---- Picard iteration internals ------------------------------------------
//
// An iterate keeps its states at every grid time (for sup-diffs and as the
// final trajectory) and the averaged-interaction tables the *next* iterate's
// linear solves will freeze. In the default mode the table for step m is
// snapshotted at the same intra-step stage the coupled stepper uses (after
// the kinetic half-step); in midpoint mode tables live on the endpoint states
// and each step uses the mean of its two endpoints.

struct FactorStates {
    std::vector<std::vector<cplx>> states;  // (M+1) x n
};

struct IterateData {
    FactorStates x, y;
    // extra potential tables: pot_on_x[m] enters the x-solve of the next
    // iterate at step m (left mode, size M) or at state m (midpoint, M+1).
    std::vector<std::vector<double>> pot_on_x, pot_on_y;
};

struct FactorSetup {
    const Grid1D* grid;
    const std::vector<double>* v_static;
    StepPlan plan;
    // density on this factor's grid -> averaged interaction on the other grid
    std::function<void(std::span<const double>, std::span<double>)> emit;
    std::size_t other_n;
};

// Extra-potential source for one linear solve.
struct ExtraTables {
    const std::vector<std::vector<double>>* tables = nullptr;  // per step/state
    const std::vector<double>* frozen = nullptr;               // constant in t
    bool midpoint = false;
};

void solve_factor(const FactorSetup& fs, const std::vector<cplx>& phi0,
                  const ExtraTables& extra, std::size_t steps, bool emit_midstage,
                  FactorStates& out_states, std::vector<std::vector<double>>& out_emitted) {
    std::size_t n = fs.grid->n();
    WaveFunction phi(*fs.grid, phi0);
    std::vector<double> rho(n), vtot(n);

    out_states.states.clear();
    out_states.states.reserve(steps + 1);
    out_states.states.push_back(phi.values);
    out_emitted.clear();
    out_emitted.reserve(emit_midstage ? steps : steps + 1);

    auto emit_from_current = [&]() {
        density(phi, rho);
        out_emitted.emplace_back(fs.other_n);
        fs.emit(rho, out_emitted.back());
    };

    if (!emit_midstage) emit_from_current();  // endpoint table at t_0

    for (std::size_t m = 0; m < steps; ++m) {
        apply_half_kinetic(phi, fs.plan);
        if (emit_midstage) emit_from_current();

        for (std::size_t j = 0; j < n; ++j) vtot[j] = (*fs.v_static)[j];
        if (extra.tables) {
            if (extra.midpoint) {
                const auto& a = (*extra.tables)[m];
                const auto& b = (*extra.tables)[m + 1];
                for (std::size_t j = 0; j < n; ++j) vtot[j] += 0.5 * (a[j] + b[j]);
            } else {
                const auto& a = (*extra.tables)[m];
                for (std::size_t j = 0; j < n; ++j) vtot[j] += a[j];
            }
        } else if (extra.frozen) {
            for (std::size_t j = 0; j < n; ++j) vtot[j] += (*extra.frozen)[j];
        }
        apply_potential_phase(phi, vtot, fs.plan.dt);
        apply_half_kinetic(phi, fs.plan);
        out_states.states.push_back(phi.values);
        if (!emit_midstage) emit_from_current();  // endpoint table at t_{m+1}
    }

    if (has_nan(phi)) {
        throw std::runtime_error("Picard linear solve produced non-finite values");
    }
}

double sup_state_diff(const IterateData& a, const IterateData& b, double dx, double dy) {
    const auto& k = kernels::active();
    std::size_t count = a.x.states.size();
    double sup = 0.0;
    std::vector<cplx> diff;
    for (std::size_t m = 0; m < count; ++m) {
        double s = 0.0;
        for (int which = 0; which < 2; ++which) {
            const auto& u = which == 0 ? a.x.states[m] : a.y.states[m];
            const auto& v = which == 0 ? b.x.states[m] : b.y.states[m];
            diff.assign(u.begin(), u.end());
            for (std::size_t j = 0; j < v.size(); ++j) diff[j] -= v[j];
            s += k.sum_abs2(diff.data(), diff.size()) * (which == 0 ? dx : dy);
        }
        sup = std::max(sup, std::sqrt(s));
    }
    return sup;
}

} // namespace

std::pair<HartreeTrajectory, PicardReport> picard_solve(const HartreeState& initial,
                                                        const PotentialSet& p,
                                                        const PicardOptions& opt) {
    check_state_grids(initial, p, "picard_solve");
    if (opt.max_iterates == 0) throw std::invalid_argument("picard_solve needs max_iterates >= 1");
    if (!(opt.tol > 0.0)) throw std::invalid_argument("picard_solve needs tol > 0");
    std::size_t steps = step_count(opt.T1, opt.dt);

    const std::size_t nx = p.grid_x().n(), ny = p.grid_y().n();
    // Two full iterates live at once: states (M+1 per factor, complex) plus
    // averaged tables (~M per factor, real).
    std::size_t bytes = 2 * ((steps + 1) * (nx + ny) * sizeof(cplx) +
                             (steps + 1) * (nx + ny) * sizeof(double));
    if (bytes > opt.storage_limit_mb * (std::size_t{1} << 20)) {
        throw std::runtime_error(
            "picard_solve: iterate storage " + std::to_string(bytes >> 20) +
            " MiB exceeds limit " + std::to_string(opt.storage_limit_mb) +
            " MiB; coarsen dt, shorten T1, or raise picard.storage_limit_mb");
    }

    FactorSetup fx{&p.grid_x(), &p.v1(), make_step_plan(p.grid_x(), opt.dt),
                   [&p](std::span<const double> rho, std::span<double> out) {
                       p.averaged_over_x(rho, out);
                   },
                   ny};
    FactorSetup fy{&p.grid_y(), &p.v2(), make_step_plan(p.grid_y(), opt.dt),
                   [&p](std::span<const double> rho, std::span<double> out) {
                       p.averaged_over_y(rho, out);
                   },
                   nx};

    const bool midstage = !opt.midpoint_averages;

    // Seed iterate.
    IterateData cur;
    {
        ExtraTables seed_extra;  // free flow: no interaction term
        std::vector<double> init_on_x, init_on_y;
        if (opt.seed == PicardSeed::frozen_initial) {
            init_on_x = averaged_potential_over_y(p, initial.phi_y);
            init_on_y = averaged_potential_over_x(p, initial.phi_x);
        }
        ExtraTables x_extra = seed_extra, y_extra = seed_extra;
        if (opt.seed == PicardSeed::frozen_initial) {
            x_extra.frozen = &init_on_x;
            y_extra.frozen = &init_on_y;
        }
        solve_factor(fx, initial.phi_x.values, x_extra, steps, midstage, cur.x, cur.pot_on_y);
        solve_factor(fy, initial.phi_y.values, y_extra, steps, midstage, cur.y, cur.pot_on_x);
    }

    PicardReport report;
    report.tol = opt.tol;

    for (std::size_t n = 0; n < opt.max_iterates; ++n) {
        IterateData next;
        ExtraTables x_extra{&cur.pot_on_x, nullptr, opt.midpoint_averages};
        ExtraTables y_extra{&cur.pot_on_y, nullptr, opt.midpoint_averages};
        solve_factor(fx, initial.phi_x.values, x_extra, steps, midstage, next.x, next.pot_on_y);
        solve_factor(fy, initial.phi_y.values, y_extra, steps, midstage, next.y, next.pot_on_x);

        double d = sup_state_diff(next, cur, p.grid_x().dx(), p.grid_y().dx());
        report.sup_diffs.push_back(d);
        ++report.iterates;
        cur = std::move(next);
        if (d < opt.tol) break;
    }
    report.converged = !report.sup_diffs.empty() && report.sup_diffs.back() < opt.tol;
    for (std::size_t k = 0; k + 1 < report.sup_diffs.size(); ++k) {
        double dk = report.sup_diffs[k];
        report.ratios.push_back(dk > 0.0 ? report.sup_diffs[k + 1] / dk : 0.0);
    }

    HartreeTrajectory traj;
    traj.dt = opt.dt;
    traj.states.reserve(steps + 1);
    for (std::size_t m = 0; m <= steps; ++m) {
        traj.states.push_back(HartreeState{
            initial.t + static_cast<double>(m) * opt.dt,
            WaveFunction(p.grid_x(), cur.x.states[m]),
            WaveFunction(p.grid_y(), cur.y.states[m])});
    }
    return {std::move(traj), std::move(report)};
}

std::pair<HartreeTrajectory, PicardReport> continue_picard(const HartreeTrajectory& prev,
                                                           const PicardReport& prev_report,
                                                           const PotentialSet& p,
                                                           const PicardOptions& opt) {
    if (prev.states.empty()) {
        throw std::invalid_argument("continue_picard: previous trajectory is empty");
    }
    if (!prev_report.converged) {
        throw std::runtime_error("continue_picard: previous segment did not converge; "
                                 "refusing to extend a non-contracted iterate");
    }
    if (prev.states.size() > 1 && prev.dt != opt.dt) {
        throw std::invalid_argument("continue_picard: segment dt differs from previous spacing");
    }

    auto [seg, rep] = picard_solve(prev.states.back(), p, opt);

    HartreeTrajectory combined;
    combined.dt = opt.dt;
    combined.meta = prev.meta;
    combined.states = prev.states;
    combined.states.insert(combined.states.end(),
                           seg.states.begin() + 1, seg.states.end());
    return {std::move(combined), std::move(rep)};
}

} // namespace hartree
