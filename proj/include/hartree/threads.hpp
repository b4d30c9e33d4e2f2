#pragma once

#include <cstddef>
#include <functional>

namespace hartree::threads {

// Number of worker threads internal loops may use. Resolved once per process:
// HARTREE_THREADS environment variable if set (clamped to >= 1), otherwise
// std::thread::hardware_concurrency().
int cap();

// Runs fn over [0, n) split into contiguous chunks, one per worker. The chunk
// layout depends only on n and cap(), so results of chunk-wise reductions are
// reproducible on a fixed machine/config. Runs inline when one chunk suffices.
void parallel_for_chunks(std::size_t n,
                         const std::function<void(std::size_t begin, std::size_t end,
                                                  std::size_t chunk_index)>& fn);

// Number of chunks parallel_for_chunks will use for a loop of length n.
std::size_t chunk_count(std::size_t n);

} // namespace hartree::threads
