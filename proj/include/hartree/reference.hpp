#pragma once

// Full 2D reference solver for i d/dt psi = (-1/2 Lap + V1 + V2 + w) psi on
// the tensor grid, used to measure how far the mean-field product ansatz
// drifts from the true two-body evolution. Same Strang layout as the 1D
// propagator; the kinetic half-step runs 1D transforms along rows then
// columns, and the multiplier table exp(-i (dt/2) (kx^2 + ky^2)/2) is
// precomputed on the tensor grid.

#include "hartree/grid.hpp"
#include "hartree/hartree.hpp"
#include "hartree/potentials.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace hartree {

struct Field2D {
    Grid1D gx, gy;
    std::vector<cplx> values;  // row-major [ix * ny + iy]

    Field2D(const Grid1D& x, const Grid1D& y)
        : gx(x), gy(y), values(x.n() * y.n(), cplx(0.0, 0.0)) {}
    Field2D(const Grid1D& x, const Grid1D& y, std::vector<cplx> v);
};

struct Snapshot2D {
    double t = 0.0;
    Field2D psi;
};

struct Trajectory2D {
    std::vector<Snapshot2D> snapshots;  // uniformly spaced
    double dt = 0.0;                    // spacing between stored snapshots
    std::string meta;
};

// psi[ix, iy] = phi_x[ix] * phi_y[iy]
Field2D product_state(const WaveFunction& phi_x, const WaveFunction& phi_y);

double l2_norm(const Field2D& f);
cplx inner_product(const Field2D& f, const Field2D& g);
bool has_nan(const Field2D& f);

// Default cap on tensor-grid size (points); larger solves need an explicit
// acknowledgement from the caller.
inline constexpr std::size_t kMax2DPoints = std::size_t{1} << 22;

class FullPropagator2D {
public:
    // Throws if nx*ny exceeds kMax2DPoints and allow_large is false.
    FullPropagator2D(const PotentialSet& p, double dt, bool allow_large = false);

    void step(Field2D& psi);  // K(dt/2) P(dt) K(dt/2)

    // Total energy <psi, H psi> for the (possibly non-normalized) field.
    double energy(const Field2D& psi) const;

private:
    const PotentialSet& p_;
    double dt_;
    std::vector<cplx> half_kinetic_;  // tensor table, row-major
    std::vector<double> v_total_;     // V1(x) + V2(y) + w(x,y)
    std::vector<double> kin_weight_;  // (kx^2 + ky^2)/2, row-major
};

void full_step_2d(Field2D& psi, const PotentialSet& p, double dt);

Trajectory2D run_full_2d(const Field2D& psi0, const PotentialSet& p, double T, double dt,
                         std::size_t record_every = 1, bool allow_large = false);

// || psi - phi_x (x) phi_y ||_{L2} on the tensor grid.
double hartree_error(const Field2D& psi, const HartreeState& s);

// psi <- (-1/2 Lap + V1 + V2 + w) psi ; used by variational diagnostics.
void apply_hamiltonian_2d(Field2D& psi, const PotentialSet& p);

} // namespace hartree
