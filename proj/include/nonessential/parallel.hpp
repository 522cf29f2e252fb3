#pragma once

#include <cstddef>
#include <functional>

namespace nonessential {

/// Worker count: `requested` if nonzero, else NONESSENTIAL_THREADS, else the
/// hardware concurrency. Never below 1.
std::size_t worker_count(std::size_t requested = 0);

/// Runs body(0..n-1) on up to `threads` workers. Each index should write only
/// its own output slot, so the result is independent of scheduling. The
/// exception from the lowest failing index, if any, is rethrown.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace nonessential
