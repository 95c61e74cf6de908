#pragma once

#include <cstddef>
#include <functional>

namespace kramers {

// Worker count: KRAMERS_RING_THREADS if set and positive, otherwise the
// hardware concurrency (at least 1).
unsigned default_thread_count();

// Overrides default_thread_count() for the current process; 0 restores the default.
void set_thread_count(unsigned threads);

// Runs body(i) for i in [0, count) on a pool of worker threads. Each index is
// processed exactly once; callers write into per-index slots and reduce in
// index order afterwards, which keeps results independent of the pool size.
// The first exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace kramers
