#include "hartree/kernels.hpp"

// AVX2 kernel variants. This translation unit is compiled with -mavx2 -mfma;
// nothing here executes unless runtime dispatch confirmed CPU support.
//
// Pointwise ops mirror the scalar rounding sequence exactly (separate multiply
// followed by a single add/sub), so they are bit-identical to the reference.
// Reductions keep four-lane accumulators and combine at the end, which changes
// the summation order; those are compared against the reference with relative
// tolerances in the equivalence tests.

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

namespace hartree::kernels {

namespace avx2_impl {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

void cmul(cplx* a, const cplx* b, std::size_t n) {
    double* pa = reinterpret_cast<double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d va = _mm256_loadu_pd(pa + 2 * i);
        __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        __m256d b_re = _mm256_movedup_pd(vb);        // (br0, br0, br1, br1)
        __m256d b_im = _mm256_permute_pd(vb, 0xF);   // (bi0, bi0, bi1, bi1)
        __m256d a_sw = _mm256_permute_pd(va, 0x5);   // (ai0, ar0, ai1, ar1)
        __m256d res = _mm256_addsub_pd(_mm256_mul_pd(va, b_re),
                                       _mm256_mul_pd(a_sw, b_im));
        _mm256_storeu_pd(pa + 2 * i, res);
    }
    for (; i < n; ++i) {
        double ar = a[i].real(), ai = a[i].imag();
        double br = b[i].real(), bi = b[i].imag();
        a[i] = cplx(ar * br - ai * bi, ar * bi + ai * br);
    }
}

void scale(cplx* a, double s, std::size_t n) {
    double* pa = reinterpret_cast<double*>(a);
    __m256d vs = _mm256_set1_pd(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        _mm256_storeu_pd(pa + 2 * i, _mm256_mul_pd(_mm256_loadu_pd(pa + 2 * i), vs));
    }
    for (; i < n; ++i) a[i] = cplx(a[i].real() * s, a[i].imag() * s);
}

void abs2(const cplx* a, double* out, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v0 = _mm256_loadu_pd(pa + 2 * i);      // a[i], a[i+1]
        __m256d v1 = _mm256_loadu_pd(pa + 2 * i + 4);  // a[i+2], a[i+3]
        __m256d s0 = _mm256_mul_pd(v0, v0);
        __m256d s1 = _mm256_mul_pd(v1, v1);
        // hadd lane layout: (s0_0+s0_1, s1_0+s1_1, s0_2+s0_3, s1_2+s1_3)
        //                 = (|a0|^2, |a2|^2, |a1|^2, |a3|^2) -> reorder.
        __m256d h = _mm256_hadd_pd(s0, s1);
        __m256d r = _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0));
        _mm256_storeu_pd(out + i, r);
    }
    for (; i < n; ++i) {
        double ar = a[i].real(), ai = a[i].imag();
        out[i] = ar * ar + ai * ai;
    }
}

cplx cdot(const cplx* a, const cplx* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    __m256d acc_p = _mm256_setzero_pd();  // even: ar*br, odd: ai*bi
    __m256d acc_q = _mm256_setzero_pd();  // even: ai*br, odd: ar*bi
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d va = _mm256_loadu_pd(pa + 2 * i);
        __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        __m256d a_sw = _mm256_permute_pd(va, 0x5);
        acc_p = _mm256_fmadd_pd(va, vb, acc_p);
        acc_q = _mm256_fmadd_pd(a_sw, vb, acc_q);
    }
    double re = hsum(acc_p);
    // im = sum(odd lanes) - sum(even lanes); addsub(0, q) flips even signs.
    double im = hsum(_mm256_addsub_pd(_mm256_setzero_pd(), acc_q));
    for (; i < n; ++i) {
        double ar = a[i].real(), ai = a[i].imag();
        double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return cplx(re, im);
}

double sum_abs2(const cplx* a, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d v = _mm256_loadu_pd(pa + 2 * i);
        acc = _mm256_fmadd_pd(v, v, acc);
    }
    double r = hsum(acc);
    for (; i < n; ++i) {
        double ar = a[i].real(), ai = a[i].imag();
        r += ar * ar + ai * ai;
    }
    return r;
}

double weighted_sum_abs2(const double* w, const cplx* a, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v0 = _mm256_loadu_pd(pa + 2 * i);
        __m256d v1 = _mm256_loadu_pd(pa + 2 * i + 4);
        __m256d h = _mm256_hadd_pd(_mm256_mul_pd(v0, v0), _mm256_mul_pd(v1, v1));
        __m256d mag = _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0));
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), mag, acc);
    }
    double r = hsum(acc);
    for (; i < n; ++i) {
        double ar = a[i].real(), ai = a[i].imag();
        r += w[i] * (ar * ar + ai * ai);
    }
    return r;
}

double dot(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
    }
    double r = hsum(acc);
    for (; i < n; ++i) r += a[i] * b[i];
    return r;
}

void matvec(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* y) {
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = m + r * cols;
        __m256d acc = _mm256_setzero_pd();
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            acc = _mm256_fmadd_pd(_mm256_loadu_pd(row + c), _mm256_loadu_pd(x + c), acc);
        }
        double s = hsum(acc);
        for (; c < cols; ++c) s += row[c] * x[c];
        y[r] = s;
    }
}

void vecmat(const double* m, std::size_t rows, std::size_t cols,
            const double* x, double* y) {
    // Accumulates in the same element-wise order as the reference (mul + add,
    // no FMA), so results match it bitwise.
    for (std::size_t c = 0; c < cols; ++c) y[c] = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = m + r * cols;
        __m256d xr = _mm256_set1_pd(x[r]);
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            __m256d acc = _mm256_loadu_pd(y + c);
            acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(row + c), xr));
            _mm256_storeu_pd(y + c, acc);
        }
        for (; c < cols; ++c) y[c] += row[c] * x[r];
    }
}

double rank1_residual_norm2(const cplx* psi, const cplx* a, const cplx* b,
                            std::size_t nx, std::size_t ny) {
    const double* pb = reinterpret_cast<const double*>(b);
    __m256d acc = _mm256_setzero_pd();
    double tail = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
        const double* prow = reinterpret_cast<const double*>(psi + i * ny);
        double ar = a[i].real(), ai = a[i].imag();
        __m256d var = _mm256_set1_pd(ar);
        __m256d vai = _mm256_set1_pd(ai);
        std::size_t j = 0;
        for (; j + 2 <= ny; j += 2) {
            __m256d vb = _mm256_loadu_pd(pb + 2 * j);
            __m256d b_sw = _mm256_permute_pd(vb, 0x5);
            // even: ar*br - ai*bi, odd: ar*bi + ai*br
            __m256d prod = _mm256_addsub_pd(_mm256_mul_pd(var, vb),
                                            _mm256_mul_pd(vai, b_sw));
            __m256d d = _mm256_sub_pd(_mm256_loadu_pd(prow + 2 * j), prod);
            acc = _mm256_fmadd_pd(d, d, acc);
        }
        for (; j < ny; ++j) {
            double br = b[j].real(), bi = b[j].imag();
            double dr = psi[i * ny + j].real() - (ar * br - ai * bi);
            double di = psi[i * ny + j].imag() - (ar * bi + ai * br);
            tail += dr * dr + di * di;
        }
    }
    return hsum(acc) + tail;
}

} // namespace avx2_impl

bool avx2_available() {
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const Ops& avx2() {
    static const Ops ops = {
        "avx2",
        avx2_impl::cmul,
        avx2_impl::scale,
        avx2_impl::abs2,
        avx2_impl::cdot,
        avx2_impl::sum_abs2,
        avx2_impl::weighted_sum_abs2,
        avx2_impl::dot,
        avx2_impl::matvec,
        avx2_impl::vecmat,
        avx2_impl::rank1_residual_norm2,
    };
    return avx2_available() ? ops : scalar();
}

} // namespace hartree::kernels

#else // non-x86: AVX2 variant unavailable, dispatch stays on scalar.

namespace hartree::kernels {
bool avx2_available() { return false; }
const Ops& avx2() { return scalar(); }
} // namespace hartree::kernels

#endif
