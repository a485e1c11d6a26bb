#pragma once

#include <cstddef>
#include <functional>

namespace qjumps {

/// 0 means "use hardware concurrency".
unsigned resolve_workers(unsigned requested);

/// Runs body(i) for i in [0, n) on up to `workers` threads. Callers write into
/// pre-sized per-index slots, so results never depend on the schedule.
/// The first exception thrown by any body is rethrown after all threads join.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body);

}  // namespace qjumps
