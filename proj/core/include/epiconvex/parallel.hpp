#pragma once

#include <cstddef>
#include <functional>

namespace epiconvex {

/// Worker count: EPICONVEX_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
std::size_t thread_count();

/// Runs body(begin, end) over a static partition of [0, n). Each index is
/// handled by exactly one call, so per-index outputs do not depend on the
/// thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace epiconvex
