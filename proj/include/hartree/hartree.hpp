#pragma once

// Coupled mean-field system on a product ansatz psi(t,x,y) ~ phi_x(t,x) *
// phi_y(t,y):
//   i d/dt phi_x = (-1/2 d_xx + V1 + <w>_y[phi_y]) phi_x
//   i d/dt phi_y = (-1/2 d_yy + V2 + <w>_x[phi_x]) phi_y
// where <w>_y[phi_y](x) = integral of w(x,y) |phi_y(y)|^2 dy and mirrored for
// <w>_x. Direct time stepping (run_hartree) and the fixed-point iteration
// that solves the same discrete system through a sequence of *linear*
// propagations with frozen averages (picard_solve) share one step layout:
//
//   K(dt/2) on both factors -> averages from the current densities ->
//   P(dt) with V + average   -> K(dt/2)
//
// The potential substep leaves both densities invariant, so it integrates the
// frozen-average subflow exactly. The iteration snapshots the averages of
// iterate n at the same intra-step stage, which makes its fixed point
// coincide with the direct stepper's trajectory down to rounding.

#include "hartree/grid.hpp"
#include "hartree/potentials.hpp"
#include "hartree/propagator.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace hartree {

struct HartreeState {
    double t = 0.0;
    WaveFunction phi_x;
    WaveFunction phi_y;
};

struct HartreeTrajectory {
    std::vector<HartreeState> states;  // uniformly spaced in time
    double dt = 0.0;                   // spacing between consecutive stored states
    std::string meta;                  // config digest (empty outside the CLI)
};

// Stateful stepper owning plans and scratch; potentials must outlive it.
class HartreePropagator {
public:
    HartreePropagator(const PotentialSet& p, double dt);

    // One coupled step; advances s.t by dt. Throws std::runtime_error with the
    // failing time if the state turns non-finite.
    void step(HartreeState& s);

    const StepPlan& plan_x() const { return plan_x_; }
    const StepPlan& plan_y() const { return plan_y_; }

private:
    const PotentialSet& p_;
    StepPlan plan_x_, plan_y_;
    std::vector<double> rho_x_, rho_y_, vtot_x_, vtot_y_;
};

// One-shot convenience form of the coupled step.
HartreeState hartree_step(const HartreeState& s, double dt, const PotentialSet& p);

// floor(T/dt) with a relative rounding nudge, so horizons that divide dt only
// up to floating-point noise keep their last step. Shared by every driver.
std::size_t step_count(double T, double dt);

// floor(T/dt) coupled steps from `initial`, recording every record_every-th
// state (the initial state included). No renormalization anywhere.
HartreeTrajectory run_hartree(const HartreeState& initial, const PotentialSet& p,
                              double T, double dt, std::size_t record_every = 1);

enum class PicardSeed {
    free_flow,       // iterate 0 propagates with V1/V2 only (no interaction)
    frozen_initial,  // iterate 0 uses averages of the initial data, frozen in t
};

struct PicardOptions {
    double T1 = 0.25;
    double dt = 1e-3;
    std::size_t max_iterates = 8;  // fixed-point updates beyond the seed
    double tol = 1e-10;            // early stop once sup-diff falls below
    PicardSeed seed = PicardSeed::free_flow;
    // false: each step freezes the average snapshotted at its own index;
    // true: averages interpolated from the two endpoint-state densities.
    bool midpoint_averages = false;
    std::size_t storage_limit_mb = 512;
};

struct PicardReport {
    std::size_t iterates = 0;       // updates performed
    std::vector<double> sup_diffs;  // d_n = sup_m ||Phi_{n+1}(t_m) - Phi_n(t_m)||_{L2 x L2}
    std::vector<double> ratios;     // ratios[k] = d_{k+1} / d_k
    bool converged = false;
    double tol = 0.0;
};

// Iterates the frozen-average linear solves from the seed until sup_diffs
// drop below tol or max_iterates is reached. Returns the last iterate's
// trajectory (stored at every step) and the contraction record.
std::pair<HartreeTrajectory, PicardReport> picard_solve(const HartreeState& initial,
                                                        const PotentialSet& p,
                                                        const PicardOptions& opt);

// Restarts the iteration from the final state of a converged previous segment
// and returns the concatenated trajectory (seam state stored once) plus the
// new segment's report. Throws if the previous segment did not converge or
// the step sizes disagree.
std::pair<HartreeTrajectory, PicardReport> continue_picard(const HartreeTrajectory& prev,
                                                           const PicardReport& prev_report,
                                                           const PotentialSet& p,
                                                           const PicardOptions& opt);

} // namespace hartree
