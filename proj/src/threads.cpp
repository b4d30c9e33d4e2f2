#include "hartree/threads.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace hartree::threads {

namespace {

int resolve_cap() {
    if (const char* env = std::getenv("HARTREE_THREADS")) {
        try {
            int v = std::stoi(env);
            return std::max(1, v);
        } catch (...) {
            return 1;
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace

int cap() {
    static const int value = resolve_cap();
    return value;
}

std::size_t chunk_count(std::size_t n) {
    if (n == 0) return 0;
    std::size_t c = static_cast<std::size_t>(cap());
    // No point spinning up a thread for fewer than ~4k elements of work.
    std::size_t by_size = std::max<std::size_t>(1, n / 4096);
    return std::min({c, n, by_size});
}

void parallel_for_chunks(std::size_t n,
                         const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    std::size_t chunks = chunk_count(n);
    if (chunks <= 1) {
        if (n > 0) fn(0, n, 0);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(chunks);
    for (std::size_t c = 0; c < chunks; ++c) {
        std::size_t begin = n * c / chunks;
        std::size_t end = n * (c + 1) / chunks;
        workers.emplace_back([&fn, begin, end, c] { fn(begin, end, c); });
    }
    for (auto& w : workers) w.join();
}

} // namespace hartree::threads
