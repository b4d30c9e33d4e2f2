#pragma once

// Periodic uniform grid and the wavefunctions living on it. One grid per
// spatial factor; the spectral convention is:
//   points[j]      = x_min + j*dx,            dx = (x_max - x_min)/n
//   wavenumbers[j] = 2*pi*m_j/(x_max - x_min), m_j = j (j < n/2), j - n (else)
// i.e. wavenumbers come in transform order, matching the FFT bin layout.

#include "hartree/fft.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace hartree {

using cplx = std::complex<double>;

class Grid1D {
public:
    // n must be a power of two >= 8; x_min < x_max, both finite.
    Grid1D(std::size_t n, double x_min, double x_max);

    std::size_t n() const { return n_; }
    double x_min() const { return x_min_; }
    double x_max() const { return x_max_; }
    double dx() const { return dx_; }
    double length() const { return x_max_ - x_min_; }

    const std::vector<double>& points() const { return points_; }
    const std::vector<double>& wavenumbers() const { return wavenumbers_; }

    bool operator==(const Grid1D& other) const {
        return n_ == other.n_ && x_min_ == other.x_min_ && x_max_ == other.x_max_;
    }

private:
    std::size_t n_;
    double x_min_, x_max_, dx_;
    std::vector<double> points_;
    std::vector<double> wavenumbers_;
};

struct WaveFunction {
    Grid1D grid;
    std::vector<cplx> values;  // values[j] = phi(points[j])

    explicit WaveFunction(const Grid1D& g) : grid(g), values(g.n(), cplx(0.0, 0.0)) {}
    WaveFunction(const Grid1D& g, std::vector<cplx> v);
};

// Samples f on the grid (no normalization applied).
WaveFunction sample(const Grid1D& g, const std::function<cplx(double)>& f);

// Rectangle-rule inner product sum_j conj(f_j) g_j dx; conjugate-linear in the
// first argument. Throws std::invalid_argument on grid mismatch.
cplx inner_product(const WaveFunction& f, const WaveFunction& g);

double l2_norm(const WaveFunction& f);

// Scales f to unit L2 norm; throws on (numerically) zero input.
void normalize(WaveFunction& f);

// f <- IFFT( factor(k) * FFT(f) ), factor evaluated on the grid wavenumbers.
void apply_kinetic_multiplier(WaveFunction& f, const std::function<cplx(double)>& factor);
// Same with a precomputed table in transform order (hot path).
void apply_kinetic_multiplier(WaveFunction& f, std::span<const cplx> factor_table);

// sum_j x_j^2 |f_j|^2 dx
double second_moment(const WaveFunction& f);

// (1/2) * || d/dx f ||^2, evaluated spectrally.
double kinetic_energy(const WaveFunction& f);

// sum_j v_j |f_j|^2 dx. v must have grid size.
double potential_energy(const WaveFunction& f, std::span<const double> v);

// |f_j|^2 into out (sized n).
void density(const WaveFunction& f, std::span<double> out);

// Sum of |f_j|^2 dx over the `margin` outermost points on each side.
double boundary_mass(const WaveFunction& f, std::size_t margin = 5);

// True if any value is non-finite.
bool has_nan(const WaveFunction& f);

} // namespace hartree
