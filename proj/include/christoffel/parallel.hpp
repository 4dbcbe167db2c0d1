#pragma once

#include <cstddef>
#include <functional>

namespace christoffel {

/// Worker count: CHRISTOFFEL_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

/// Calls body(begin, end) on disjoint contiguous chunks covering [0, n).
/// Chunk boundaries depend only on n and the worker count; results must not
/// depend on which thread runs which chunk.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t min_chunk = 256);

}  // namespace christoffel
