#pragma once

#include <cstddef>
#include <functional>

namespace cesarolab {

// requested <= 0 selects hardware concurrency (at least 1).
int resolve_thread_count(int requested);

// Static contiguous partition of [0, n); body(begin, end, worker). The first
// exception thrown by any worker is rethrown on the calling thread.
void parallel_for_chunks(std::size_t n, int threads,
                         const std::function<void(std::size_t, std::size_t, int)>& body);

}  // namespace cesarolab
