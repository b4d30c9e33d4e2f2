#include "hartree/grid.hpp"

#include "hartree/kernels.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hartree {

Grid1D::Grid1D(std::size_t n, double x_min, double x_max)
    : n_(n), x_min_(x_min), x_max_(x_max) {
    if (n < 8 || (n & (n - 1)) != 0) {
        throw std::invalid_argument("grid size must be a power of two >= 8, got " +
                                    std::to_string(n));
    }
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
        throw std::invalid_argument("grid bounds must be finite with x_min < x_max");
    }
    dx_ = (x_max_ - x_min_) / static_cast<double>(n_);
    points_.resize(n_);
    wavenumbers_.resize(n_);
    double dk = 2.0 * std::numbers::pi / (x_max_ - x_min_);
    for (std::size_t j = 0; j < n_; ++j) {
        points_[j] = x_min_ + static_cast<double>(j) * dx_;
        auto m = static_cast<std::ptrdiff_t>(j < n_ / 2 ? j : j - n_);
        wavenumbers_[j] = dk * static_cast<double>(m);
    }
}

WaveFunction::WaveFunction(const Grid1D& g, std::vector<cplx> v)
    : grid(g), values(std::move(v)) {
    if (values.size() != grid.n()) {
        throw std::invalid_argument("wavefunction value count does not match grid size");
    }
}

WaveFunction sample(const Grid1D& g, const std::function<cplx(double)>& f) {
    WaveFunction w(g);
    for (std::size_t j = 0; j < g.n(); ++j) w.values[j] = f(g.points()[j]);
    return w;
}

cplx inner_product(const WaveFunction& f, const WaveFunction& g) {
    if (!(f.grid == g.grid)) {
        throw std::invalid_argument("inner_product: wavefunctions live on different grids");
    }
    cplx s = kernels::active().cdot(f.values.data(), g.values.data(), f.values.size());
    return s * f.grid.dx();
}

double l2_norm(const WaveFunction& f) {
    double s = kernels::active().sum_abs2(f.values.data(), f.values.size());
    return std::sqrt(s * f.grid.dx());
}

void normalize(WaveFunction& f) {
    double nrm = l2_norm(f);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        throw std::runtime_error("normalize: wavefunction has zero or non-finite norm");
    }
    kernels::active().scale(f.values.data(), 1.0 / nrm, f.values.size());
}

void apply_kinetic_multiplier(WaveFunction& f, const std::function<cplx(double)>& factor) {
    std::vector<cplx> table(f.grid.n());
    for (std::size_t j = 0; j < f.grid.n(); ++j) table[j] = factor(f.grid.wavenumbers()[j]);
    apply_kinetic_multiplier(f, std::span<const cplx>(table));
}

void apply_kinetic_multiplier(WaveFunction& f, std::span<const cplx> factor_table) {
    std::size_t n = f.grid.n();
    if (factor_table.size() != n) {
        throw std::invalid_argument("kinetic multiplier table size does not match grid");
    }
    fft::forward(f.values.data(), n);
    kernels::active().cmul(f.values.data(), factor_table.data(), n);
    fft::inverse(f.values.data(), n);
}

double second_moment(const WaveFunction& f) {
    std::size_t n = f.grid.n();
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) {
        double x = f.grid.points()[j];
        w[j] = x * x;
    }
    return kernels::active().weighted_sum_abs2(w.data(), f.values.data(), n) * f.grid.dx();
}

double kinetic_energy(const WaveFunction& f) {
    std::size_t n = f.grid.n();
    std::vector<cplx> hat(f.values);
    fft::forward(hat.data(), n);
    std::vector<double> w(n);
    for (std::size_t j = 0; j < n; ++j) {
        double k = f.grid.wavenumbers()[j];
        w[j] = 0.5 * k * k;
    }
    // Parseval with unnormalized forward transform: ||phi||^2 = (dx/n) sum |hat|^2.
    double s = kernels::active().weighted_sum_abs2(w.data(), hat.data(), n);
    return s * f.grid.dx() / static_cast<double>(n);
}

double potential_energy(const WaveFunction& f, std::span<const double> v) {
    if (v.size() != f.grid.n()) {
        throw std::invalid_argument("potential sample count does not match grid");
    }
    return kernels::active().weighted_sum_abs2(v.data(), f.values.data(), v.size()) *
           f.grid.dx();
}

void density(const WaveFunction& f, std::span<double> out) {
    if (out.size() != f.grid.n()) {
        throw std::invalid_argument("density output size does not match grid");
    }
    kernels::active().abs2(f.values.data(), out.data(), out.size());
}

double boundary_mass(const WaveFunction& f, std::size_t margin) {
    std::size_t n = f.grid.n();
    if (2 * margin > n) margin = n / 2;
    double s = 0.0;
    for (std::size_t j = 0; j < margin; ++j) {
        s += std::norm(f.values[j]) + std::norm(f.values[n - 1 - j]);
    }
    return s * f.grid.dx();
}

bool has_nan(const WaveFunction& f) {
    for (const cplx& z : f.values) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return true;
    }
    return false;
}

} // namespace hartree
