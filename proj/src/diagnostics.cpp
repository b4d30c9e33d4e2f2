#include "hartree/diagnostics.hpp"

#include "hartree/fft.hpp"
#include "hartree/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace hartree {

EnergyBreakdown energy_parts(const HartreeState& s, const PotentialSet& p) {
    if (!(s.phi_x.grid == p.grid_x()) || !(s.phi_y.grid == p.grid_y())) {
        throw std::invalid_argument("energy_parts: state grids do not match potential grids");
    }
    EnergyBreakdown e;
    e.kin_x = kinetic_energy(s.phi_x);
    e.pot_x = potential_energy(s.phi_x, p.v1());
    e.kin_y = kinetic_energy(s.phi_y);
    e.pot_y = potential_energy(s.phi_y, p.v2());

    std::vector<double> rho_x(p.grid_x().n()), rho_y(p.grid_y().n());
    density(s.phi_x, rho_x);
    density(s.phi_y, rho_y);
    // int w rho_x rho_y = <rho_x, <w>_y[rho_y]>_x ; the averaged table already
    // carries the dy weight.
    std::vector<double> avg_on_x = p.averaged_over_y(rho_y);
    e.coupling = kernels::active().dot(avg_on_x.data(), rho_x.data(), rho_x.size()) *
                 p.grid_x().dx();
    return e;
}

double energy(const HartreeState& s, const PotentialSet& p) {
    return energy_parts(s, p).total();
}

double factor_graded_norm_sq(const WaveFunction& phi, std::span<const double> v, int k) {
    if (v.size() != phi.grid.n()) {
        throw std::invalid_argument("graded norm: potential sample count does not match grid");
    }
    double vmin = *std::min_element(v.begin(), v.end());
    if (vmin < 1.0) {
        throw std::invalid_argument(
            "graded norm needs the potential floored at 1 (grid min " + std::to_string(vmin) +
            "); shift the potentials first");
    }
    if (k != 1 && k != 2) {
        throw std::invalid_argument("graded norm index must be 1 or 2");
    }
    double n2 = kernels::active().sum_abs2(phi.values.data(), phi.values.size()) * phi.grid.dx();
    if (k == 1) {
        return n2 + kinetic_energy(phi) + potential_energy(phi, v);
    }
    // k == 2: ||phi||^2 + ||H phi||^2 with H phi formed spectrally + pointwise.
    std::size_t n = phi.grid.n();
    std::vector<cplx> hphi(phi.values);
    fft::forward(hphi.data(), n);
    for (std::size_t j = 0; j < n; ++j) {
        double kk = phi.grid.wavenumbers()[j];
        hphi[j] *= 0.5 * kk * kk;
    }
    fft::inverse(hphi.data(), n);
    for (std::size_t j = 0; j < n; ++j) hphi[j] += v[j] * phi.values[j];
    double h2 = kernels::active().sum_abs2(hphi.data(), n) * phi.grid.dx();
    return n2 + h2;
}

double graded_norm(const HartreeState& s, const PotentialSet& p, int alpha, int beta) {
    if (!(s.phi_x.grid == p.grid_x()) || !(s.phi_y.grid == p.grid_y())) {
        throw std::invalid_argument("graded_norm: state grids do not match potential grids");
    }
    return std::sqrt(factor_graded_norm_sq(s.phi_x, p.v1(), alpha) +
                     factor_graded_norm_sq(s.phi_y, p.v2(), beta));
}

TangentVector tangent_project(const Field2D& psi, const HartreeState& base) {
    if (!(psi.gx == base.phi_x.grid) || !(psi.gy == base.phi_y.grid)) {
        throw std::invalid_argument("tangent_project: grids do not match");
    }
    if (std::abs(l2_norm(base.phi_x) - 1.0) > 1e-10 ||
        std::abs(l2_norm(base.phi_y) - 1.0) > 1e-10) {
        throw std::invalid_argument("tangent_project: base factors must be unit-norm");
    }
    std::size_t nx = psi.gx.n(), ny = psi.gy.n();
    double dx = psi.gx.dx(), dy = psi.gy.dx();
    const auto& k = kernels::active();

    TangentVector tv{WaveFunction(base.phi_x.grid), WaveFunction(base.phi_y.grid)};

    // vy(j) = sum_i conj(phi_x_i) psi_ij dx   (column reduction)
    for (std::size_t i = 0; i < nx; ++i) {
        cplx cxi = std::conj(base.phi_x.values[i]);
        const cplx* row = psi.values.data() + i * ny;
        for (std::size_t j = 0; j < ny; ++j) tv.vy.values[j] += cxi * row[j];
    }
    for (std::size_t j = 0; j < ny; ++j) tv.vy.values[j] *= dx;

    // vx~(i) = sum_j conj(phi_y_j) psi_ij dy  (row reduction)
    for (std::size_t i = 0; i < nx; ++i) {
        cplx s = k.cdot(base.phi_y.values.data(), psi.values.data() + i * ny, ny);
        tv.vx.values[i] = s * dy;
    }
    // overlap <phi_x (x) phi_y, psi> and the gauge-fixing subtraction
    cplx overlap = k.cdot(base.phi_x.values.data(), tv.vx.values.data(), nx) * dx;
    for (std::size_t i = 0; i < nx; ++i) {
        tv.vx.values[i] -= overlap * base.phi_x.values[i];
    }
    return tv;
}

Field2D reconstruct_tangent(const TangentVector& v, const HartreeState& base) {
    if (!(v.vx.grid == base.phi_x.grid) || !(v.vy.grid == base.phi_y.grid)) {
        throw std::invalid_argument("reconstruct_tangent: grids do not match");
    }
    std::size_t nx = base.phi_x.grid.n(), ny = base.phi_y.grid.n();
    Field2D out(base.phi_x.grid, base.phi_y.grid);
    for (std::size_t i = 0; i < nx; ++i) {
        cplx a = v.vx.values[i];
        cplx b = base.phi_x.values[i];
        cplx* row = out.values.data() + i * ny;
        for (std::size_t j = 0; j < ny; ++j) {
            row[j] = a * base.phi_y.values[j] + b * v.vy.values[j];
        }
    }
    return out;
}

double dirac_frenkel_residual(const HartreeTrajectory& traj, const PotentialSet& p,
                              std::size_t m) {
    if (traj.states.size() < 3) {
        throw std::invalid_argument("dirac_frenkel_residual needs at least 3 stored states");
    }
    if (m == 0 || m + 1 >= traj.states.size()) {
        throw std::invalid_argument("dirac_frenkel_residual: index must be interior");
    }
    if (!(traj.dt > 0.0)) {
        throw std::invalid_argument("dirac_frenkel_residual: trajectory spacing must be > 0");
    }

    const HartreeState& sm = traj.states[m];
    Field2D u = product_state(sm.phi_x, sm.phi_y);
    Field2D u_prev = product_state(traj.states[m - 1].phi_x, traj.states[m - 1].phi_y);
    Field2D u_next = product_state(traj.states[m + 1].phi_x, traj.states[m + 1].phi_y);

    Field2D hu = u;
    apply_hamiltonian_2d(hu, p);

    // r = i (u_next - u_prev) / (2 dt) - H u
    Field2D r(u.gx, u.gy);
    double inv2dt = 1.0 / (2.0 * traj.dt);
    for (std::size_t idx = 0; idx < r.values.size(); ++idx) {
        cplx du = (u_next.values[idx] - u_prev.values[idx]) * inv2dt;
        r.values[idx] = cplx(0.0, 1.0) * du - hu.values[idx];
    }

    // Project onto the tangent space at the (renormalized) base point: the
    // tangent subspace is invariant under factor rescaling, so normalizing
    // here keeps the projection well-defined even for slightly drifted or
    // deliberately perturbed trajectories.
    HartreeState base = sm;
    normalize(base.phi_x);
    normalize(base.phi_y);
    TangentVector tv = tangent_project(r, base);

    // The product representation leaves a global phase free, and the coupled
    // system pins it only up to the mean coupling <w>: the defect of the exact
    // flow lies entirely along u itself. The meaningful residual therefore
    // lives in the quotient by span{u}, i.e. with the vy component gauged
    // against phi_y exactly as vx already is against phi_x (these are the two
    // transverse variational conditions the flow does satisfy).
    const cplx along = inner_product(base.phi_y, tv.vy);
    for (std::size_t j = 0; j < tv.vy.values.size(); ++j) {
        tv.vy.values[j] -= along * base.phi_y.values[j];
    }
    return l2_norm(reconstruct_tangent(tv, base));
}

DiagnosticsRecord collect_diagnostics(const HartreeState& s, const PotentialSet& p,
                                      std::optional<double> df_residual) {
    DiagnosticsRecord rec;
    rec.t = s.t;
    rec.norm_x = l2_norm(s.phi_x);
    rec.norm_y = l2_norm(s.phi_y);
    EnergyBreakdown e = energy_parts(s, p);
    rec.kin_x = e.kin_x;
    rec.pot_x = e.pot_x;
    rec.kin_y = e.kin_y;
    rec.pot_y = e.pot_y;
    rec.coupling = e.coupling;
    rec.energy = e.total();
    rec.h11 = graded_norm(s, p, 1, 1);
    rec.h22 = graded_norm(s, p, 2, 2);
    rec.boundary_mass = std::max(boundary_mass(s.phi_x), boundary_mass(s.phi_y));
    rec.df_residual = df_residual;
    return rec;
}

} // namespace hartree
