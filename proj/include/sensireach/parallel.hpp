#pragma once

#include <cstddef>
#include <functional>

namespace sensireach {

// Resolves a requested worker count: positive values pass through, 0 falls
// back to the SENSIREACH_THREADS environment variable and then to the
// hardware concurrency.  Always returns at least 1.
int resolve_thread_count(int requested);

// Runs body(i) for i in [0, count) on up to `threads` workers using a static
// block partition.  Results must be written to per-index slots so the output
// is identical for any worker count.  If bodies throw, the exception from the
// smallest failing index is rethrown.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace sensireach
