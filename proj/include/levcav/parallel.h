#pragma once

#include <cstddef>
#include <functional>

namespace levcav {

/// Worker count: `requested` if positive, else LEVCAV_THREADS if set, else
/// the hardware concurrency. Never less than 1.
unsigned worker_count(unsigned requested = 0);

/// Runs body(i) for i in [0, n) on `workers` threads pulling indices from a
/// shared counter. Results must be written to per-index slots by the caller,
/// so output order never depends on scheduling. The first exception thrown
/// by any body is rethrown after all workers have joined.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

} // namespace levcav
