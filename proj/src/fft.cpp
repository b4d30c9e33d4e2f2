#include "hartree/fft.hpp"

#include "hartree/kernels.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace hartree::fft {

namespace {

// FFTW plan creation is not thread-safe; execution of an existing plan is.
// Plans are created once per layout with FFTW_ESTIMATE | FFTW_UNALIGNED and
// then executed on caller buffers via the new-array interface (UNALIGNED
// removes the alignment constraint on those buffers).
struct PlanCache {
    using Key = std::tuple<std::size_t, int, std::size_t, std::ptrdiff_t, std::ptrdiff_t>;
    std::mutex mu;
    std::map<Key, fftw_plan> plans;

    fftw_plan get(std::size_t n, int sign, std::size_t count,
                  std::ptrdiff_t stride, std::ptrdiff_t dist) {
        Key key{n, sign, count, stride, dist};
        std::lock_guard<std::mutex> lock(mu);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;

        // Scratch buffer spanning the full batch layout; estimate-mode
        // planning does not touch its contents.
        std::size_t span = 1;
        if (count > 0 && n > 0) {
            span = static_cast<std::size_t>((count - 1) * dist + (n - 1) * stride) + 1;
        }
        std::vector<cplx> scratch(span);
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        int ni = static_cast<int>(n);
        fftw_plan p = fftw_plan_many_dft(
            1, &ni, static_cast<int>(count),
            buf, nullptr, static_cast<int>(stride), static_cast<int>(dist),
            buf, nullptr, static_cast<int>(stride), static_cast<int>(dist),
            sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans.emplace(key, p);
        return p;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

void execute(cplx* data, std::size_t n, int sign, std::size_t count,
             std::ptrdiff_t stride, std::ptrdiff_t dist) {
    fftw_plan p = cache().get(n, sign, count, stride, dist);
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(p, buf, buf);
}

} // namespace

void forward(cplx* data, std::size_t n) {
    execute(data, n, FFTW_FORWARD, 1, 1, 0);
}

void inverse(cplx* data, std::size_t n) {
    execute(data, n, FFTW_BACKWARD, 1, 1, 0);
    kernels::active().scale(data, 1.0 / static_cast<double>(n), n);
}

void forward_many(cplx* data, std::size_t n, std::size_t count,
                  std::ptrdiff_t stride, std::ptrdiff_t dist) {
    execute(data, n, FFTW_FORWARD, count, stride, dist);
}

void inverse_many_raw(cplx* data, std::size_t n, std::size_t count,
                      std::ptrdiff_t stride, std::ptrdiff_t dist) {
    execute(data, n, FFTW_BACKWARD, count, stride, dist);
}

} // namespace hartree::fft
