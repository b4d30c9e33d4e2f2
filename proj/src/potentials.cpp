#include "hartree/potentials.hpp"

#include "hartree/kernels.hpp"
#include "hartree/threads.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace hartree {

namespace {

// chi(x) = a * exp(1 - 1/t), t = 1 - (x/s)^2, on |x| < s.
// Written against t so the |x| -> s edge stays NaN-free: once t underflows the
// exponential is exactly zero and every derivative term multiplies it.
struct BumpEval {
    double value = 0.0, d1 = 0.0, d2 = 0.0;
};

BumpEval eval_pure(double a, double s, double x) {
    BumpEval r;
    double u = x / s;
    double t = 1.0 - u * u;
    if (!(t > 0.0)) return r;  // outside (or rounded onto) the support edge
    double v = a * std::exp(1.0 - 1.0 / t);
    // d/dx log chi = g, g = -2u / (s t^2); g' = -2 (1 + 3u^2) / (s^2 t^3)
    double g = -2.0 * u / (s * t * t);
    double gp = -2.0 * (1.0 + 3.0 * u * u) / (s * s * t * t * t);
    r.value = v;
    r.d1 = v * g;
    r.d2 = v * (g * g + gp);
    return r;
}

BumpEval eval_bump(const BumpSpec& b, double x) {
    BumpEval p = eval_pure(b.amplitude, b.support_radius, x);
    if (b.shape == BumpShape::pure_bump) return p;
    BumpEval r;
    r.value = x * p.value;
    r.d1 = p.value + x * p.d1;
    r.d2 = 2.0 * p.d1 + x * p.d2;
    return r;
}

void validate_bump(const BumpSpec& b) {
    if (!(b.support_radius > 0.0) || !std::isfinite(b.support_radius) ||
        !std::isfinite(b.amplitude)) {
        throw std::invalid_argument("bump spec needs finite amplitude and support_radius > 0");
    }
}

std::vector<double> fd_derivative(const std::vector<double>& v, double dx) {
    std::size_t n = v.size();
    std::vector<double> d(n, 0.0);
    if (n < 2) return d;
    d[0] = (v[1] - v[0]) / dx;
    d[n - 1] = (v[n - 1] - v[n - 2]) / dx;
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2.0 * dx);
    return d;
}

void require_finite(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " contains non-finite samples");
    }
}

} // namespace

double bump_value(const BumpSpec& b, double x) {
    validate_bump(b);
    return eval_bump(b, x).value;
}

double bump_derivative(const BumpSpec& b, double x) {
    validate_bump(b);
    return eval_bump(b, x).d1;
}

double bump_second_derivative(const BumpSpec& b, double x) {
    validate_bump(b);
    return eval_bump(b, x).d2;
}

PotentialSet::PotentialSet(Grid1D gx, Grid1D gy,
                           std::vector<double> v1, std::vector<double> v2,
                           Coupling coupling,
                           std::vector<double> dv1, std::vector<double> dv2)
    : gx_(std::move(gx)), gy_(std::move(gy)),
      v1_(std::move(v1)), v2_(std::move(v2)),
      dv1_(std::move(dv1)), dv2_(std::move(dv2)),
      coupling_(std::move(coupling)) {
    if (v1_.size() != gx_.n() || v2_.size() != gy_.n()) {
        throw std::invalid_argument("potential sample counts do not match the grids");
    }
    require_finite(v1_, "V1");
    require_finite(v2_, "V2");
    if (dv1_.empty()) dv1_ = fd_derivative(v1_, gx_.dx());
    if (dv2_.empty()) dv2_ = fd_derivative(v2_, gy_.dx());
    if (dv1_.size() != gx_.n() || dv2_.size() != gy_.n()) {
        throw std::invalid_argument("potential derivative sample counts do not match the grids");
    }
    if (const auto* sep = std::get_if<SeparableCoupling>(&coupling_)) {
        if (sep->fx.size() != gx_.n() || sep->dfx.size() != gx_.n() || sep->d2fx.size() != gx_.n() ||
            sep->gy.size() != gy_.n() || sep->dgy.size() != gy_.n() || sep->d2gy.size() != gy_.n()) {
            throw std::invalid_argument("separable coupling sample counts do not match the grids");
        }
        require_finite(sep->fx, "coupling fx");
        require_finite(sep->gy, "coupling gy");
    } else if (const auto* tab = std::get_if<TabulatedCoupling>(&coupling_)) {
        if (tab->values.size() != gx_.n() * gy_.n()) {
            throw std::invalid_argument("tabulated coupling must have n_x * n_y samples");
        }
        require_finite(tab->values, "coupling table");
    }
}

PotentialSet PotentialSet::double_well_bump(const Grid1D& gx, const Grid1D& gy,
                                            double ell, double omega, const BumpSpec& bump,
                                            bool zero_coupling) {
    if (!(ell > 0.0) || !(omega > 0.0)) {
        throw std::invalid_argument("double_well_bump needs ell > 0 and omega > 0");
    }
    validate_bump(bump);
    std::size_t nx = gx.n(), ny = gy.n();
    std::vector<double> v1(nx), dv1(nx), v2(ny), dv2(ny);
    for (std::size_t i = 0; i < nx; ++i) {
        double x = gx.points()[i];
        double q = x / (2.0 * ell) - 1.0;
        v1[i] = 0.5 * x * x * q * q;
        dv1[i] = x * q * q + x * x * q / (2.0 * ell);
    }
    for (std::size_t j = 0; j < ny; ++j) {
        double y = gy.points()[j];
        v2[j] = 0.5 * omega * omega * y * y;
        dv2[j] = omega * omega * y;
    }
    Coupling coupling = std::monostate{};
    if (!zero_coupling) {
        SeparableCoupling sep;
        sep.fx.resize(nx);
        sep.dfx.resize(nx);
        sep.d2fx.resize(nx);
        sep.gy.resize(ny);
        sep.dgy.resize(ny);
        sep.d2gy.resize(ny);
        for (std::size_t i = 0; i < nx; ++i) {
            BumpEval e = eval_bump(bump, gx.points()[i]);
            sep.fx[i] = e.value;
            sep.dfx[i] = e.d1;
            sep.d2fx[i] = e.d2;
        }
        for (std::size_t j = 0; j < ny; ++j) {
            double y = gy.points()[j];
            sep.gy[j] = y * y;
            sep.dgy[j] = 2.0 * y;
            sep.d2gy[j] = 2.0;
        }
        coupling = std::move(sep);
    }
    return PotentialSet(gx, gy, std::move(v1), std::move(v2), std::move(coupling),
                        std::move(dv1), std::move(dv2));
}

double PotentialSet::w(std::size_t ix, std::size_t iy) const {
    if (const auto* sep = std::get_if<SeparableCoupling>(&coupling_)) {
        return sep->fx[ix] * sep->gy[iy];
    }
    if (const auto* tab = std::get_if<TabulatedCoupling>(&coupling_)) {
        return tab->values[ix * gy_.n() + iy];
    }
    return 0.0;
}

double PotentialSet::min_v1() const { return *std::min_element(v1_.begin(), v1_.end()); }
double PotentialSet::min_v2() const { return *std::min_element(v2_.begin(), v2_.end()); }

void PotentialSet::averaged_over_y(std::span<const double> density_y,
                                   std::span<double> out) const {
    if (density_y.size() != gy_.n() || out.size() != gx_.n()) {
        throw std::invalid_argument("averaged_over_y: size mismatch with grids");
    }
    const auto& k = kernels::active();
    if (const auto* sep = std::get_if<SeparableCoupling>(&coupling_)) {
        double s = k.dot(sep->gy.data(), density_y.data(), gy_.n()) * gy_.dx();
        for (std::size_t i = 0; i < gx_.n(); ++i) out[i] = sep->fx[i] * s;
    } else if (const auto* tab = std::get_if<TabulatedCoupling>(&coupling_)) {
        k.matvec(tab->values.data(), gx_.n(), gy_.n(), density_y.data(), out.data());
        for (std::size_t i = 0; i < gx_.n(); ++i) out[i] *= gy_.dx();
    } else {
        std::fill(out.begin(), out.end(), 0.0);
    }
}

void PotentialSet::averaged_over_x(std::span<const double> density_x,
                                   std::span<double> out) const {
    if (density_x.size() != gx_.n() || out.size() != gy_.n()) {
        throw std::invalid_argument("averaged_over_x: size mismatch with grids");
    }
    const auto& k = kernels::active();
    if (const auto* sep = std::get_if<SeparableCoupling>(&coupling_)) {
        double s = k.dot(sep->fx.data(), density_x.data(), gx_.n()) * gx_.dx();
        for (std::size_t j = 0; j < gy_.n(); ++j) out[j] = sep->gy[j] * s;
    } else if (const auto* tab = std::get_if<TabulatedCoupling>(&coupling_)) {
        k.vecmat(tab->values.data(), gx_.n(), gy_.n(), density_x.data(), out.data());
        for (std::size_t j = 0; j < gy_.n(); ++j) out[j] *= gx_.dx();
    } else {
        std::fill(out.begin(), out.end(), 0.0);
    }
}

std::vector<double> PotentialSet::averaged_over_y(std::span<const double> density_y) const {
    std::vector<double> out(gx_.n());
    averaged_over_y(density_y, out);
    return out;
}

std::vector<double> PotentialSet::averaged_over_x(std::span<const double> density_x) const {
    std::vector<double> out(gy_.n());
    averaged_over_x(density_x, out);
    return out;
}

std::vector<double> averaged_potential_over_y(const PotentialSet& p, const WaveFunction& phi_y) {
    if (!(phi_y.grid == p.grid_y())) {
        throw std::invalid_argument("averaged_potential_over_y: wavefunction grid mismatch");
    }
    std::vector<double> rho(phi_y.grid.n());
    density(phi_y, rho);
    return p.averaged_over_y(rho);
}

std::vector<double> averaged_potential_over_x(const PotentialSet& p, const WaveFunction& phi_x) {
    if (!(phi_x.grid == p.grid_x())) {
        throw std::invalid_argument("averaged_potential_over_x: wavefunction grid mismatch");
    }
    std::vector<double> rho(phi_x.grid.n());
    density(phi_x, rho);
    return p.averaged_over_x(rho);
}

ShiftResult shift_to_unit_floor(const PotentialSet& p, double floor) {
    ShiftResult r{p, 0.0, 0.0};
    double m1 = p.min_v1(), m2 = p.min_v2();
    if (m1 < floor) r.shift_v1 = floor - m1;
    if (m2 < floor) r.shift_v2 = floor - m2;
    std::vector<double> v1 = p.v1(), v2 = p.v2();
    for (double& v : v1) v += r.shift_v1;
    for (double& v : v2) v += r.shift_v2;
    r.potentials = PotentialSet(p.grid_x(), p.grid_y(), std::move(v1), std::move(v2),
                                p.coupling(), p.dv1(), p.dv2());
    return r;
}

namespace {

// Per-cell interaction magnitudes the checker scans for.
struct CellBounds {
    double w_abs, dx_abs, dy_abs, lap_abs;
};

} // namespace

AssumptionReport check_assumptions(const PotentialSet& p, std::span<const double> offset_sweep) {
    if (offset_sweep.empty()) {
        throw std::invalid_argument("check_assumptions needs at least one offset candidate");
    }
    const std::size_t nx = p.grid_x().n(), ny = p.grid_y().n();
    const auto& v1 = p.v1();
    const auto& v2 = p.v2();

    AssumptionReport rep;
    rep.min_v1 = p.min_v1();
    rep.min_v2 = p.min_v2();
    rep.floor_ok = rep.min_v1 >= 1.0 && rep.min_v2 >= 1.0;
    {
        std::ostringstream os;
        os << "[" << p.grid_x().x_min() << ", " << p.grid_x().x_max() << "] x ["
           << p.grid_y().x_min() << ", " << p.grid_y().x_max() << "], "
           << nx << " x " << ny << " points";
        rep.domain = os.str();
    }

    // temperance constants
    double t1 = 0.0, t2 = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
        double den = 1.0 + v1[i];
        t1 = std::max(t1, den > 0.0 ? std::abs(p.dv1()[i]) / den
                                    : std::numeric_limits<double>::infinity());
    }
    for (std::size_t j = 0; j < ny; ++j) {
        double den = 1.0 + v2[j];
        t2 = std::max(t2, den > 0.0 ? std::abs(p.dv2()[j]) / den
                                    : std::numeric_limits<double>::infinity());
    }
    rep.temperance_v1 = t1;
    rep.temperance_v2 = t2;

    // Tensor-grid scan for the interaction bounds. The per-cell magnitudes
    // come from analytic samples (separable) or finite differences
    // (tabulated); the scan itself is a max-reduction, chunked over rows.
    const auto* sep = std::get_if<SeparableCoupling>(&p.coupling());
    const auto* tab = std::get_if<TabulatedCoupling>(&p.coupling());

    std::size_t n_off = offset_sweep.size();
    std::vector<std::vector<double>> chunk_ratio;  // [chunk][offset]
    std::vector<std::array<double, 3>> chunk_growth;
    std::size_t chunks = std::max<std::size_t>(1, threads::chunk_count(nx));
    chunk_ratio.assign(chunks, std::vector<double>(n_off, 0.0));
    chunk_growth.assign(chunks, {0.0, 0.0, 0.0});

    auto cell = [&](std::size_t i, std::size_t j) -> CellBounds {
        if (sep) {
            return {std::abs(sep->fx[i] * sep->gy[j]),
                    std::abs(sep->dfx[i] * sep->gy[j]),
                    std::abs(sep->fx[i] * sep->dgy[j]),
                    std::abs(sep->d2fx[i] * sep->gy[j]) + std::abs(sep->fx[i] * sep->d2gy[j])};
        }
        if (tab) {
            const auto& w = tab->values;
            double dx = p.grid_x().dx(), dy = p.grid_y().dx();
            auto at = [&](std::size_t a, std::size_t b) { return w[a * ny + b]; };
            double wx = (i == 0)        ? (at(1, j) - at(0, j)) / dx
                        : (i == nx - 1) ? (at(nx - 1, j) - at(nx - 2, j)) / dx
                                        : (at(i + 1, j) - at(i - 1, j)) / (2.0 * dx);
            double wy = (j == 0)        ? (at(i, 1) - at(i, 0)) / dy
                        : (j == ny - 1) ? (at(i, ny - 1) - at(i, ny - 2)) / dy
                                        : (at(i, j + 1) - at(i, j - 1)) / (2.0 * dy);
            double wxx = (i == 0 || i == nx - 1)
                             ? 0.0
                             : (at(i + 1, j) - 2.0 * at(i, j) + at(i - 1, j)) / (dx * dx);
            double wyy = (j == 0 || j == ny - 1)
                             ? 0.0
                             : (at(i, j + 1) - 2.0 * at(i, j) + at(i, j - 1)) / (dy * dy);
            return {std::abs(at(i, j)), std::abs(wx), std::abs(wy),
                    std::abs(wxx) + std::abs(wyy)};
        }
        return {0.0, 0.0, 0.0, 0.0};
    };

    threads::parallel_for_chunks(nx, [&](std::size_t begin, std::size_t end, std::size_t c) {
        auto& ratio = chunk_ratio[c];
        auto& growth = chunk_growth[c];
        for (std::size_t i = begin; i < end; ++i) {
            double a1 = v1[i];
            double s1 = std::sqrt(std::max(a1, 0.0));
            for (std::size_t j = 0; j < ny; ++j) {
                double a2 = v2[j];
                CellBounds cb = cell(i, j);
                for (std::size_t o = 0; o < n_off; ++o) {
                    double den = a1 + a2 + offset_sweep[o];
                    double r = den > 0.0 ? cb.w_abs / den
                                         : (cb.w_abs > 0.0
                                                ? std::numeric_limits<double>::infinity()
                                                : 0.0);
                    ratio[o] = std::max(ratio[o], r);
                }
                double s2 = std::sqrt(std::max(a2, 0.0));
                growth[0] = std::max(growth[0], cb.dx_abs / (s1 + a2 + 1.0));
                growth[1] = std::max(growth[1], cb.dy_abs / (a1 + s2 + 1.0));
                growth[2] = std::max(growth[2], cb.lap_abs / (a1 + a2 + 1.0));
            }
        }
    });

    std::vector<double> ratio(n_off, 0.0);
    std::array<double, 3> growth{0.0, 0.0, 0.0};
    for (std::size_t c = 0; c < chunks; ++c) {
        for (std::size_t o = 0; o < n_off; ++o) ratio[o] = std::max(ratio[o], chunk_ratio[c][o]);
        for (int g = 0; g < 3; ++g) growth[g] = std::max(growth[g], chunk_growth[c][g]);
    }

    std::size_t best = 0;
    for (std::size_t o = 1; o < n_off; ++o) {
        if (ratio[o] < ratio[best]) best = o;
    }
    rep.c0 = ratio[best];
    rep.c0_offset = offset_sweep[best];
    rep.coupling_ok = rep.c0 < 1.0;

    rep.growth[0] = {rep.coupling_ok, rep.c0};
    rep.growth[1] = {std::isfinite(growth[0]), growth[0]};
    rep.growth[2] = {std::isfinite(growth[1]), growth[1]};
    rep.growth[3] = {std::isfinite(growth[2]), growth[2]};

    rep.all_ok = rep.floor_ok && rep.coupling_ok && rep.growth[1].ok && rep.growth[2].ok &&
                 rep.growth[3].ok && std::isfinite(rep.temperance_v1) &&
                 std::isfinite(rep.temperance_v2);
    return rep;
}

} // namespace hartree
