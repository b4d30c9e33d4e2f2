#pragma once

// Observables and consistency monitors for the coupled mean-field evolution:
// energy and its breakdown, operator-graded Sobolev-type norms, the tangent
// projection onto the product manifold (with the <phi_x, vx> = 0 gauge), and
// the variational (Dirac-Frenkel) residual of a stored trajectory.

#include "hartree/hartree.hpp"
#include "hartree/potentials.hpp"
#include "hartree/reference.hpp"

#include <cstddef>
#include <optional>
#include <span>

namespace hartree {

struct EnergyBreakdown {
    double kin_x = 0.0, pot_x = 0.0, kin_y = 0.0, pot_y = 0.0, coupling = 0.0;
    double total() const { return kin_x + pot_x + kin_y + pot_y + coupling; }
};

// E = 1/2||phi_x'||^2 + <V1> + 1/2||phi_y'||^2 + <V2> + int w |phi_x|^2 |phi_y|^2
EnergyBreakdown energy_parts(const HartreeState& s, const PotentialSet& p);
double energy(const HartreeState& s, const PotentialSet& p);

// Graded norm of one factor: ||phi||^2 + <phi, H phi>        (k = 1)
//                            ||phi||^2 + ||H phi||^2         (k = 2)
// with H = -1/2 d^2/dx^2 + v. Requires min(v) >= 1 (the grading is only
// monotone for potentials above the unit floor); throws otherwise.
double factor_graded_norm_sq(const WaveFunction& phi, std::span<const double> v, int k);

// sqrt of the sum of the two factor graded norms with indices (alpha, beta).
double graded_norm(const HartreeState& s, const PotentialSet& p, int alpha, int beta);

// Tangent vector at the product point (phi_x, phi_y), gauge <phi_x, vx> = 0.
struct TangentVector {
    WaveFunction vx;
    WaveFunction vy;
};

// L2-orthogonal projection of a 2D field onto the tangent space of the
// product manifold at `base`:
//   vy = <phi_x, psi>_x,  vx = <phi_y, psi>_y - <phi_x (x) phi_y, psi> phi_x
// Requires unit-norm base factors (within 1e-10); throws otherwise.
TangentVector tangent_project(const Field2D& psi, const HartreeState& base);

// vx (x) phi_y + phi_x (x) vy
Field2D reconstruct_tangent(const TangentVector& v, const HartreeState& base);

// || P_T ( i * (u_{m+1} - u_{m-1}) / (2 dt) - H u_m ) ||_{L2} where
// u_k = product_state(traj.states[k]) and dt is the stored spacing.
// Requires 1 <= m <= states.size() - 2.
double dirac_frenkel_residual(const HartreeTrajectory& traj, const PotentialSet& p,
                              std::size_t m);

struct DiagnosticsRecord {
    double t = 0.0;
    double norm_x = 0.0, norm_y = 0.0;
    double energy = 0.0;
    double kin_x = 0.0, pot_x = 0.0, kin_y = 0.0, pot_y = 0.0, coupling = 0.0;
    double h11 = 0.0, h22 = 0.0;        // graded norms with indices (1,1), (2,2)
    double boundary_mass = 0.0;         // max over the two factors
    std::optional<double> df_residual;  // empty when not computed
};

// Snapshot diagnostics; graded norms require floored potentials.
DiagnosticsRecord collect_diagnostics(const HartreeState& s, const PotentialSet& p,
                                      std::optional<double> df_residual = std::nullopt);

} // namespace hartree
