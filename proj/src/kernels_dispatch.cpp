#include "hartree/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace hartree::kernels {

namespace {

const Ops* resolve_initial() {
    if (const char* env = std::getenv("HARTREE_KERNELS")) {
        std::string v(env);
        if (v == "scalar") return &scalar();
        if (v == "avx2") {
            if (!avx2_available())
                throw std::runtime_error("HARTREE_KERNELS=avx2 but CPU lacks AVX2/FMA");
            return &avx2();
        }
        // anything else (including "auto") falls through to detection
    }
    return avx2_available() ? &avx2() : &scalar();
}

std::atomic<const Ops*>& slot() {
    static std::atomic<const Ops*> s{resolve_initial()};
    return s;
}

} // namespace

const Ops& active() { return *slot().load(std::memory_order_relaxed); }

void select(const char* which) {
    std::string v(which ? which : "");
    if (v == "scalar") {
        slot().store(&scalar(), std::memory_order_relaxed);
    } else if (v == "avx2") {
        if (!avx2_available())
            throw std::runtime_error("AVX2 kernels requested but CPU lacks AVX2/FMA");
        slot().store(&avx2(), std::memory_order_relaxed);
    } else if (v == "auto") {
        slot().store(avx2_available() ? &avx2() : &scalar(), std::memory_order_relaxed);
    } else {
        throw std::invalid_argument("unknown kernel set '" + v + "' (scalar|avx2|auto)");
    }
}

} // namespace hartree::kernels
