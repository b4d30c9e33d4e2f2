#include "oracles.hpp"

#include <lapacke.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

using hartree::Grid1D;

double quad(const Grid1D& g, const std::function<double(double)>& f) {
    double s = 0.0;
    for (const double x : g.points()) s += f(x);
    return s * g.dx();
}

DenseGroundState dense_ground_state(const Grid1D& g, const std::vector<double>& v) {
    const std::size_t n = g.n();
    if (v.size() != n) throw std::invalid_argument("dense_ground_state: size mismatch");

    // K depends only on j - l on the uniform grid; build one row of cosines.
    std::vector<double> kappa(n, 0.0);
    for (std::size_t d = 0; d < n; ++d) {
        double s = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            const double k = g.wavenumbers()[m];
            s += 0.5 * k * k * std::cos(k * static_cast<double>(d) * g.dx());
        }
        kappa[d] = s / static_cast<double>(n);
    }

    std::vector<double> h(n * n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t l = 0; l < n; ++l) {
            const std::size_t d = j >= l ? j - l : l - j;
            h[j * n + l] = kappa[d] + (j == l ? v[j] : 0.0);
        }
    }

    std::vector<double> w(n);
    const lapack_int info =
        LAPACKE_dsyev(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(n), h.data(),
                      static_cast<lapack_int>(n), w.data());
    if (info != 0) throw std::runtime_error("dsyev failed: info = " + std::to_string(info));

    DenseGroundState out;
    out.energy = w[0];
    out.state.assign(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(n));
    // dsyev returns a unit Euclidean vector; rescale to quadrature norm 1.
    const double scale = 1.0 / std::sqrt(g.dx());
    for (double& s : out.state) s *= scale;
    return out;
}

std::vector<double> fd1(const Grid1D& g, const std::vector<double>& f) {
    const std::size_t n = g.n();
    const double dx = g.dx();
    std::vector<double> d(n);
    for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (f[j + 1] - f[j - 1]) / (2.0 * dx);
    d[0] = (f[1] - f[0]) / dx;
    d[n - 1] = (f[n - 1] - f[n - 2]) / dx;
    return d;
}

std::vector<double> fd2(const Grid1D& g, const std::vector<double>& f) {
    const std::size_t n = g.n();
    const double dx2 = g.dx() * g.dx();
    std::vector<double> d(n, 0.0);
    for (std::size_t j = 1; j + 1 < n; ++j) d[j] = (f[j + 1] - 2.0 * f[j] + f[j - 1]) / dx2;
    return d;
}

double brute_force_c0(const hartree::PotentialSet& p, double offset) {
    double worst = 0.0;
    for (std::size_t ix = 0; ix < p.grid_x().n(); ++ix) {
        for (std::size_t iy = 0; iy < p.grid_y().n(); ++iy) {
            const double denom = p.v1()[ix] + p.v2()[iy] + offset;
            worst = std::max(worst, std::abs(p.w(ix, iy)) / denom);
        }
    }
    return worst;
}

std::complex<double> coherent_state(double x, double t, double x0) {
    const double q = x0 * std::cos(t);
    const double phase = -0.5 * t - x * x0 * std::sin(t) + 0.25 * x0 * x0 * std::sin(2.0 * t);
    const double amp = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * (x - q) * (x - q));
    return amp * std::complex<double>(std::cos(phase), std::sin(phase));
}

std::vector<std::complex<double>> random_complex(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::complex<double>> out(n);
    for (auto& z : out) {
        const double re = u(rng);
        const double im = u(rng);
        z = {re, im};
    }
    return out;
}

} // namespace oracle
