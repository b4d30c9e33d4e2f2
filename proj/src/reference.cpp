#include "hartree/reference.hpp"

#include "hartree/fft.hpp"
#include "hartree/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hartree {

namespace {

std::size_t step_count_2d(double T, double dt) {
    if (!(T >= 0.0) || !std::isfinite(T)) throw std::invalid_argument("T must be finite and >= 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be finite and > 0");
    if (T == 0.0) return 0;
    double q = T / dt;
    return static_cast<std::size_t>(std::floor(q + 1e-9 * std::max(1.0, q)));
}

// In-place 2D transform via 1D passes: rows (contiguous) then columns
// (strided). inverse leaves the 1/(nx*ny) normalization to the caller.
void fft2_forward(cplx* data, std::size_t nx, std::size_t ny) {
    fft::forward_many(data, ny, nx, 1, static_cast<std::ptrdiff_t>(ny));
    fft::forward_many(data, nx, ny, static_cast<std::ptrdiff_t>(ny), 1);
}

void fft2_inverse_raw(cplx* data, std::size_t nx, std::size_t ny) {
    fft::inverse_many_raw(data, nx, ny, static_cast<std::ptrdiff_t>(ny), 1);
    fft::inverse_many_raw(data, ny, nx, 1, static_cast<std::ptrdiff_t>(ny));
}

} // namespace

Field2D::Field2D(const Grid1D& x, const Grid1D& y, std::vector<cplx> v)
    : gx(x), gy(y), values(std::move(v)) {
    if (values.size() != gx.n() * gy.n()) {
        throw std::invalid_argument("2D field value count does not match tensor grid");
    }
}

Field2D product_state(const WaveFunction& phi_x, const WaveFunction& phi_y) {
    Field2D f(phi_x.grid, phi_y.grid);
    std::size_t nx = phi_x.grid.n(), ny = phi_y.grid.n();
    for (std::size_t i = 0; i < nx; ++i) {
        cplx a = phi_x.values[i];
        cplx* row = f.values.data() + i * ny;
        for (std::size_t j = 0; j < ny; ++j) row[j] = a * phi_y.values[j];
    }
    return f;
}

double l2_norm(const Field2D& f) {
    double s = kernels::active().sum_abs2(f.values.data(), f.values.size());
    return std::sqrt(s * f.gx.dx() * f.gy.dx());
}

cplx inner_product(const Field2D& f, const Field2D& g) {
    if (!(f.gx == g.gx) || !(f.gy == g.gy)) {
        throw std::invalid_argument("inner_product: 2D fields live on different grids");
    }
    cplx s = kernels::active().cdot(f.values.data(), g.values.data(), f.values.size());
    return s * (f.gx.dx() * f.gy.dx());
}

bool has_nan(const Field2D& f) {
    for (const cplx& z : f.values) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return true;
    }
    return false;
}

FullPropagator2D::FullPropagator2D(const PotentialSet& p, double dt, bool allow_large)
    : p_(p), dt_(dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("FullPropagator2D needs dt > 0");
    }
    std::size_t nx = p.grid_x().n(), ny = p.grid_y().n();
    if (nx * ny > kMax2DPoints && !allow_large) {
        throw std::runtime_error(
            "2D solve needs " + std::to_string(nx * ny) + " tensor-grid points (cap " +
            std::to_string(kMax2DPoints) + "); pass the memory acknowledgement to proceed");
    }
    half_kinetic_.resize(nx * ny);
    v_total_.resize(nx * ny);
    kin_weight_.resize(nx * ny);
    for (std::size_t i = 0; i < nx; ++i) {
        double kx = p.grid_x().wavenumbers()[i];
        double fx_theta = -dt * kx * kx / 4.0;
        cplx fx(std::cos(fx_theta), std::sin(fx_theta));
        for (std::size_t j = 0; j < ny; ++j) {
            double ky = p.grid_y().wavenumbers()[j];
            double fy_theta = -dt * ky * ky / 4.0;
            half_kinetic_[i * ny + j] = fx * cplx(std::cos(fy_theta), std::sin(fy_theta));
            kin_weight_[i * ny + j] = 0.5 * (kx * kx + ky * ky);
        }
    }
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            v_total_[i * ny + j] = p.v1()[i] + p.v2()[j] + p.w(i, j);
        }
    }
}

void FullPropagator2D::step(Field2D& psi) {
    if (!(psi.gx == p_.grid_x()) || !(psi.gy == p_.grid_y())) {
        throw std::invalid_argument("full_step_2d: field grids do not match potential grids");
    }
    std::size_t nx = psi.gx.n(), ny = psi.gy.n(), total = nx * ny;
    const auto& k = kernels::active();
    double inv = 1.0 / static_cast<double>(total);

    fft2_forward(psi.values.data(), nx, ny);
    k.cmul(psi.values.data(), half_kinetic_.data(), total);
    fft2_inverse_raw(psi.values.data(), nx, ny);
    k.scale(psi.values.data(), inv, total);

    for (std::size_t idx = 0; idx < total; ++idx) {
        double theta = -dt_ * v_total_[idx];
        cplx ph(std::cos(theta), std::sin(theta));
        double ar = psi.values[idx].real(), ai = psi.values[idx].imag();
        psi.values[idx] = cplx(ar * ph.real() - ai * ph.imag(),
                               ar * ph.imag() + ai * ph.real());
    }

    fft2_forward(psi.values.data(), nx, ny);
    k.cmul(psi.values.data(), half_kinetic_.data(), total);
    fft2_inverse_raw(psi.values.data(), nx, ny);
    k.scale(psi.values.data(), inv, total);
}

double FullPropagator2D::energy(const Field2D& psi) const {
    std::size_t nx = psi.gx.n(), ny = psi.gy.n(), total = nx * ny;
    double dxdy = psi.gx.dx() * psi.gy.dx();
    std::vector<cplx> hat(psi.values);
    fft2_forward(hat.data(), nx, ny);
    double kin = kernels::active().weighted_sum_abs2(kin_weight_.data(), hat.data(), total) *
                 dxdy / static_cast<double>(total);
    double pot = kernels::active().weighted_sum_abs2(v_total_.data(), psi.values.data(), total) *
                 dxdy;
    return kin + pot;
}

void full_step_2d(Field2D& psi, const PotentialSet& p, double dt) {
    FullPropagator2D prop(p, dt);
    prop.step(psi);
}

Trajectory2D run_full_2d(const Field2D& psi0, const PotentialSet& p, double T, double dt,
                         std::size_t record_every, bool allow_large) {
    if (record_every == 0) throw std::invalid_argument("record_every must be >= 1");
    std::size_t steps = step_count_2d(T, dt);

    Trajectory2D traj;
    traj.dt = dt * static_cast<double>(record_every);
    traj.snapshots.push_back(Snapshot2D{0.0, psi0});
    if (steps == 0) return traj;

    FullPropagator2D prop(p, dt, allow_large);
    Field2D psi = psi0;
    double t = 0.0;
    for (std::size_t m = 1; m <= steps; ++m) {
        prop.step(psi);
        t = static_cast<double>(m) * dt;
        if (has_nan(psi)) {
            throw std::runtime_error("2D solve produced non-finite values at t = " +
                                     std::to_string(t));
        }
        if (m % record_every == 0) traj.snapshots.push_back(Snapshot2D{t, psi});
    }
    return traj;
}

void apply_hamiltonian_2d(Field2D& psi, const PotentialSet& p) {
    if (!(psi.gx == p.grid_x()) || !(psi.gy == p.grid_y())) {
        throw std::invalid_argument("apply_hamiltonian_2d: grids do not match");
    }
    std::size_t nx = psi.gx.n(), ny = psi.gy.n(), total = nx * ny;
    std::vector<cplx> kin(psi.values);
    fft2_forward(kin.data(), nx, ny);
    for (std::size_t i = 0; i < nx; ++i) {
        double kx = psi.gx.wavenumbers()[i];
        for (std::size_t j = 0; j < ny; ++j) {
            double ky = psi.gy.wavenumbers()[j];
            kin[i * ny + j] *= 0.5 * (kx * kx + ky * ky);
        }
    }
    fft2_inverse_raw(kin.data(), nx, ny);
    kernels::active().scale(kin.data(), 1.0 / static_cast<double>(total), total);
    for (std::size_t i = 0; i < nx; ++i) {
        for (std::size_t j = 0; j < ny; ++j) {
            std::size_t idx = i * ny + j;
            double v = p.v1()[i] + p.v2()[j] + p.w(i, j);
            psi.values[idx] = kin[idx] + v * psi.values[idx];
        }
    }
}

double hartree_error(const Field2D& psi, const HartreeState& s) {
    if (!(psi.gx == s.phi_x.grid) || !(psi.gy == s.phi_y.grid)) {
        throw std::invalid_argument("hartree_error: grids do not match");
    }
    double r2 = kernels::active().rank1_residual_norm2(
        psi.values.data(), s.phi_x.values.data(), s.phi_y.values.data(),
        psi.gx.n(), psi.gy.n());
    return std::sqrt(r2 * psi.gx.dx() * psi.gy.dx());
}

} // namespace hartree
