#pragma once

#include <cstddef>
#include <functional>

namespace modspace {

/// Number of worker threads to use, honoring the MODSPACE_THREADS env var.
int worker_count();

/// Runs fn(i) for i in [0, n). Work is split into a fixed number of chunks so
/// results that are combined chunk-by-chunk do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace modspace
