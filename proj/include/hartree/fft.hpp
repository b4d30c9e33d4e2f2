#pragma once

// Thin wrapper around the 1D complex transforms the spectral grid needs.
// Conventions (fixed by the grid contract):
//   forward:  X_k = sum_j x_j exp(-2*pi*i*j*k/n)   (unnormalized)
//   inverse:  x_j = (1/n) sum_k X_k exp(+2*pi*i*j*k/n)
//
// Plans are cached per (length, direction, batch layout) and guarded by a
// mutex; executing a cached plan is thread-safe. Planning uses estimate-mode
// only, so plan choice (and therefore output) is reproducible run to run.

#include <complex>
#include <cstddef>

namespace hartree::fft {

using cplx = std::complex<double>;

void forward(cplx* data, std::size_t n);
void inverse(cplx* data, std::size_t n);  // divides by n

// Batched in-place transforms: `count` transforms of length n, where element
// k of transform t lives at data[t*dist + k*stride]. The *_raw variants do
// not normalize; callers scale once (e.g. by 1/(nx*ny) after a 2D pass).
void forward_many(cplx* data, std::size_t n, std::size_t count,
                  std::ptrdiff_t stride, std::ptrdiff_t dist);
void inverse_many_raw(cplx* data, std::size_t n, std::size_t count,
                      std::ptrdiff_t stride, std::ptrdiff_t dist);

} // namespace hartree::fft
