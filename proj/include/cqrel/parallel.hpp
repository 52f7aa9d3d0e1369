#pragma once

#include <cstddef>
#include <functional>

namespace cqrel {

/// Effective worker count: CQREL_THREADS caps parallelism (0 or unset means
/// hardware concurrency). A programmatic request below the cap wins.
std::size_t worker_count(std::size_t requested = 0);

/// Process-wide worker request (e.g. from a --threads flag); still capped by
/// CQREL_THREADS. 0 clears the request.
void set_worker_request(std::size_t n);

/// Runs body(i) for i in [0, n) on up to worker_count() threads with a static
/// contiguous partition. Tasks must write results only to their own slot so
/// output is independent of the schedule. The first exception thrown by a
/// task is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cqrel
