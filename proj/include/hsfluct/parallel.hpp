#pragma once

#include <cstddef>
#include <functional>

namespace hsfluct {

/// Number of worker threads to use; 0 means "all hardware threads".
unsigned worker_count(unsigned requested);

/// Calls body(i) for i in [0, n) on up to `threads` workers. Each index is
/// visited exactly once; callers write results into per-index slots so the
/// outcome does not depend on scheduling. The exception thrown for the lowest
/// failing index is rethrown after all workers join.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace hsfluct
