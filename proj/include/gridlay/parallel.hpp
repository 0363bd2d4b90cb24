#pragma once

#include <cstddef>
#include <functional>

namespace gridlay {

/// Worker count used by parallel_for. Defaults to GRIDLAY_THREADS or the hardware count.
std::size_t thread_count();
void set_thread_count(std::size_t n);

/// Value of GRIDLAY_THREADS if set and positive, otherwise 0.
std::size_t threads_from_env();

/// Runs fn(i) for i in [0, n) on the work-stealing pool. Callers write results by index,
/// so output never depends on the schedule. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace gridlay
