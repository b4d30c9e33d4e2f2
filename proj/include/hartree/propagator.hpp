#pragma once

// Second-order split-step propagator for i d/dt phi = -1/2 phi'' + V phi on a
// periodic grid: step = K(dt/2) P(dt) K(dt/2) with the kinetic half-step
// applied in Fourier space and the potential step as a pointwise phase. The
// potential passed to strang_step is frozen across the step; callers with
// time-dependent extra terms pick the snapshot to freeze.

#include "hartree/grid.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace hartree {

struct StepPlan {
    Grid1D grid;
    double dt;
    std::vector<cplx> half_kinetic;  // exp(-i * (dt/2) * k^2/2) in transform order
};

StepPlan make_step_plan(const Grid1D& g, double dt);

// f <- IFFT( half_kinetic * FFT(f) )
void apply_half_kinetic(WaveFunction& f, const StepPlan& plan);

// f_j *= exp(-i * dt * v_j)
void apply_potential_phase(WaveFunction& f, std::span<const double> v, double dt);

// One K(dt/2) P(dt) K(dt/2) step with the given total potential.
void strang_step(WaveFunction& f, const StepPlan& plan, std::span<const double> v_total);

// Ground state by imaginary-time evolution of the same splitting
// (dt -> -i*dt_im), renormalizing every step; converged when the Rayleigh
// quotient moves by less than tol between steps. Throws if max_iter is
// exhausted first. The returned energy is the Rayleigh quotient
// <phi, H phi> of the final normalized state.
struct GroundStateResult {
    WaveFunction state;
    double energy = 0.0;
    std::size_t iterations = 0;
};

GroundStateResult imaginary_time_ground_state(const Grid1D& g, std::span<const double> v,
                                              double dt_im, double tol,
                                              std::size_t max_iter = 200000);

} // namespace hartree
