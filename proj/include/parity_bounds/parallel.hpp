// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <functional>

namespace parity_bounds {

// Worker count: hardware parallelism, capped by the PARITY_BOUNDS_THREADS
// environment variable when set.
int worker_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous index ranges,
// one per worker; callers get determinism by writing results indexed by i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace parity_bounds
