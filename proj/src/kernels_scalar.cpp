#include "hartree/kernels.hpp"

// Scalar reference kernels. Deliberately plain loops: these define the
// semantics the SIMD variants are tested against. Complex multiplies are
// written out component-wise so the rounding sequence is pinned (no libm
// complex-multiply fixups involved).

namespace hartree::kernels {

namespace scalar_impl {

void cmul(cplx* a, const cplx* b, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double ar = a[i].real(), ai = a[i].imag();
        double br = b[i].real(), bi = b[i].imag();
        a[i] = cplx(ar * br - ai * bi, ar * bi + ai * br);
    }
}

void scale(cplx* a, double s, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = cplx(a[i].real() * s, a[i].imag() * s);
    }
}

void abs2(const cplx* a, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double ar = a[i].real(), ai = a[i].imag();
        out[i] = ar * ar + ai * ai;
    }
}

cplx cdot(const cplx* a, const cplx* b, std::size_t n) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double ar = a[i].real(), ai = a[i].imag();
        double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return cplx(re, im);
}

double sum_abs2(const cplx* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double ar = a[i].real(), ai = a[i].imag();
        acc += ar * ar + ai * ai;
    }
    return acc;
}

double weighted_sum_abs2(const double* w, const cplx* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double ar = a[i].real(), ai = a[i].imag();
        acc += w[i] * (ar * ar + ai * ai);
    }
    return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void matvec(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = m + r * cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
        y[r] = acc;
    }
}

void vecmat(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* y) {
    for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = m + r * cols;
        double xr = x[r];
        for (std::size_t c = 0; c < cols; ++c) y[c] += row[c] * xr;
    }
}

double rank1_residual_norm2(const cplx* psi, const cplx* a, const cplx* b,
                            std::size_t nx, std::size_t ny) {
    double acc = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
        const cplx* row = psi + i * ny;
        double ar = a[i].real(), ai = a[i].imag();
        for (std::size_t j = 0; j < ny; ++j) {
            double br = b[j].real(), bi = b[j].imag();
            double dr = row[j].real() - (ar * br - ai * bi);
            double di = row[j].imag() - (ar * bi + ai * br);
            acc += dr * dr + di * di;
        }
    }
    return acc;
}

} // namespace scalar_impl

const Ops& scalar() {
    static const Ops ops = {
        "scalar",
        scalar_impl::cmul,
        scalar_impl::scale,
        scalar_impl::abs2,
        scalar_impl::cdot,
        scalar_impl::sum_abs2,
        scalar_impl::weighted_sum_abs2,
        scalar_impl::dot,
        scalar_impl::matvec,
        scalar_impl::vecmat,
        scalar_impl::rank1_residual_norm2,
    };
    return ops;
}

} // namespace hartree::kernels
