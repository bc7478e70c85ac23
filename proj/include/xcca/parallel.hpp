#pragma once

#include <cstddef>
#include <functional>

namespace xcca {

/// Thread count to use: `requested` if positive, else XCCA_THREADS, else 1.
int resolve_threads(int requested);

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index runs
/// exactly once; if any call throws, the exception of the lowest failing
/// index is rethrown after all workers finish.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace xcca
