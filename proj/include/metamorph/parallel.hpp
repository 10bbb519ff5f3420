#pragma once

#include <functional>

namespace metamorph {

// Worker count: min(requested or hardware, METAMORPH_THREADS when set), >= 1.
int resolve_thread_cap(int requested = 0);

// Runs fn(0..count-1) on up to `threads` workers. Callers must make results
// independent of execution order (write to per-index slots).
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace metamorph
