#pragma once

#include <functional>

namespace fine {

/// Worker count resolution: explicit request > FINE_THREADS env var > logical cores.
/// Always at least 1.
int resolve_threads(int requested = 0);

/// Runs fn(i) for i in [0, n) across `threads` workers pulling from a shared
/// atomic counter. Callers must write results into per-index slots so the
/// output is identical for any worker count.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace fine
