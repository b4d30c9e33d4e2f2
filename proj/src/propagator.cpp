#include "hartree/propagator.hpp"

#include "hartree/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hartree {

StepPlan make_step_plan(const Grid1D& g, double dt) {
    if (!std::isfinite(dt)) throw std::invalid_argument("step plan needs a finite dt");
    StepPlan plan{g, dt, std::vector<cplx>(g.n())};
    for (std::size_t j = 0; j < g.n(); ++j) {
        double k = g.wavenumbers()[j];
        double theta = -dt * k * k / 4.0;  // (dt/2) * k^2/2
        plan.half_kinetic[j] = cplx(std::cos(theta), std::sin(theta));
    }
    return plan;
}

void apply_half_kinetic(WaveFunction& f, const StepPlan& plan) {
    if (!(f.grid == plan.grid)) {
        throw std::invalid_argument("step plan grid does not match wavefunction grid");
    }
    apply_kinetic_multiplier(f, std::span<const cplx>(plan.half_kinetic));
}

void apply_potential_phase(WaveFunction& f, std::span<const double> v, double dt) {
    if (v.size() != f.grid.n()) {
        throw std::invalid_argument("potential sample count does not match grid");
    }
    // sin/cos dominate here; the loop stays scalar and fused (see kernels.hpp
    // for which ops carry SIMD variants).
    for (std::size_t j = 0; j < v.size(); ++j) {
        double theta = -dt * v[j];
        cplx ph(std::cos(theta), std::sin(theta));
        double ar = f.values[j].real(), ai = f.values[j].imag();
        f.values[j] = cplx(ar * ph.real() - ai * ph.imag(),
                           ar * ph.imag() + ai * ph.real());
    }
}

void strang_step(WaveFunction& f, const StepPlan& plan, std::span<const double> v_total) {
    apply_half_kinetic(f, plan);
    apply_potential_phase(f, v_total, plan.dt);
    apply_half_kinetic(f, plan);
}

GroundStateResult imaginary_time_ground_state(const Grid1D& g, std::span<const double> v,
                                              double dt_im, double tol,
                                              std::size_t max_iter) {
    if (!(dt_im > 0.0) || !(tol > 0.0) || max_iter == 0) {
        throw std::invalid_argument("imaginary_time_ground_state needs dt_im > 0, tol > 0, max_iter >= 1");
    }
    if (v.size() != g.n()) {
        throw std::invalid_argument("potential sample count does not match grid");
    }

    // Real decay tables for the imaginary-time substeps.
    std::vector<cplx> half_kinetic(g.n());
    for (std::size_t j = 0; j < g.n(); ++j) {
        double k = g.wavenumbers()[j];
        half_kinetic[j] = cplx(std::exp(-dt_im * k * k / 4.0), 0.0);
    }
    std::vector<double> decay(g.n());
    for (std::size_t j = 0; j < g.n(); ++j) decay[j] = std::exp(-dt_im * v[j]);

    // Deterministic start: constant positive state (nonzero overlap with the
    // nodeless ground state, symmetric where the potential is).
    WaveFunction phi(g);
    for (auto& z : phi.values) z = cplx(1.0, 0.0);
    normalize(phi);

    auto rayleigh = [&]() { return kinetic_energy(phi) + potential_energy(phi, v); };

    double e_prev = rayleigh();
    for (std::size_t it = 1; it <= max_iter; ++it) {
        apply_kinetic_multiplier(phi, std::span<const cplx>(half_kinetic));
        for (std::size_t j = 0; j < g.n(); ++j) phi.values[j] *= decay[j];
        apply_kinetic_multiplier(phi, std::span<const cplx>(half_kinetic));
        normalize(phi);
        double e = rayleigh();
        if (std::abs(e - e_prev) < tol) {
            return {std::move(phi), e, it};
        }
        e_prev = e;
    }
    throw std::runtime_error("imaginary-time ground state did not converge within " +
                             std::to_string(max_iter) + " iterations (|dE| tolerance " +
                             std::to_string(tol) + ")");
}

} // namespace hartree
