#pragma once

// Low-level array kernels behind the solver's inner loops. Every operation has
// a scalar reference implementation and (on x86-64) an AVX2 variant; the
// active table is picked at runtime from CPU capabilities, overridable via the
// HARTREE_KERNELS environment variable ("scalar", "avx2", "auto") or select().
//
// Contract notes:
//  - pointwise ops (cmul, scale, abs2) produce bit-identical results across
//    implementations (the AVX2 paths mirror the scalar rounding sequence);
//  - reductions (cdot, sum_abs2, ...) may differ by accumulation order and are
//    equivalence-tested to tight relative tolerances instead.

#include <complex>
#include <cstddef>

namespace hartree::kernels {

using cplx = std::complex<double>;

struct Ops {
    const char* name;

    // a[i] *= b[i]
    void (*cmul)(cplx* a, const cplx* b, std::size_t n);
    // a[i] *= s
    void (*scale)(cplx* a, double s, std::size_t n);
    // out[i] = |a[i]|^2
    void (*abs2)(const cplx* a, double* out, std::size_t n);
    // sum_i conj(a[i]) * b[i]
    cplx (*cdot)(const cplx* a, const cplx* b, std::size_t n);
    // sum_i |a[i]|^2
    double (*sum_abs2)(const cplx* a, std::size_t n);
    // sum_i w[i] * |a[i]|^2
    double (*weighted_sum_abs2)(const double* w, const cplx* a, std::size_t n);
    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y[r] = sum_c m[r*cols + c] * x[c]          (row-major, rows x cols)
    void (*matvec)(const double* m, std::size_t rows, std::size_t cols,
                   const double* x, double* y);
    // y[c] = sum_r m[r*cols + c] * x[r]          (row-major, rows x cols)
    void (*vecmat)(const double* m, std::size_t rows, std::size_t cols,
                   const double* x, double* y);
    // sum_{i,j} |psi[i*ny + j] - a[i]*b[j]|^2
    double (*rank1_residual_norm2)(const cplx* psi, const cplx* a, const cplx* b,
                                   std::size_t nx, std::size_t ny);
};

// Reference implementation; always available.
const Ops& scalar();

// AVX2 implementation; falls back to scalar() when unsupported (check
// avx2_available() to know which you got).
const Ops& avx2();

bool avx2_available();

// Dispatched table: AVX2 when the CPU has it, unless overridden.
const Ops& active();

// Override dispatch ("scalar" | "avx2" | "auto"); throws std::invalid_argument
// on unknown names and std::runtime_error if avx2 is requested but missing.
void select(const char* which);

} // namespace hartree::kernels
