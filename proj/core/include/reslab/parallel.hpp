#pragma once

#include <cstddef>
#include <functional>

namespace reslab {

/// Worker count: RESLAB_WORKERS if set and positive, otherwise
/// std::thread::hardware_concurrency() (at least 1).
unsigned worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Each index
/// is visited exactly once; results must be written to per-index slots so
/// the output does not depend on scheduling. The first exception thrown by
/// any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace reslab
