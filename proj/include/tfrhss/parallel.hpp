#pragma once

#include <cstddef>
#include <functional>

namespace tfrhss {

/// Runs fn(i) for i in [0, count) on up to `threads` workers, each taking a
/// strided share of the indices. After all workers finish, the exception of
/// the lowest failing index is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

/// Worker count from an explicit value (> 0), else TFRHSS_THREADS, else 1.
int resolve_threads(int requested);

}  // namespace tfrhss
