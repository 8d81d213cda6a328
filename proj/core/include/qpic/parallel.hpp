#pragma once

#include <cstddef>
#include <functional>

namespace qpic {

/// Worker count: QPIC_THREADS if set (integer >= 1), else the hardware
/// concurrency. Throws ValidationError on a malformed QPIC_THREADS.
std::size_t thread_count();

/// Calls task(k) for k in [0, n) on up to thread_count() threads. Tasks must
/// write to disjoint outputs; the first exception is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

}  // namespace qpic
