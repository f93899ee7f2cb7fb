#pragma once

#include <cstddef>
#include <functional>

namespace fbmlab {

/// Worker cap: the THREADS environment variable when set to a positive
/// integer, otherwise the hardware concurrency (at least 1).
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. Each
/// index runs exactly once; results must be written to per-index slots so the
/// outcome does not depend on scheduling. The exception thrown at the lowest
/// failing index is rethrown after all workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace fbmlab
