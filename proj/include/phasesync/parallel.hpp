#pragma once

#include <cstddef>
#include <functional>

namespace phasesync {

/// Worker count: `requested` if positive, else hardware concurrency; always
/// capped by the PHASESYNC_THREADS environment variable when it is set.
int worker_count(int requested = 0);

/// Calls fn(i) for i in [0, count) on up to `threads` workers. Each index is
/// claimed exactly once; results must be written to per-index slots. The
/// first exception thrown by any call is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace phasesync
