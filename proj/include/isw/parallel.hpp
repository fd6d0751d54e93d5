#pragma once

#include <cstddef>
#include <functional>

namespace isw {

// Number of worker threads used by parallel_for. Defaults to the hardware
// concurrency; 0 restores the default.
void set_thread_count(std::size_t n);
std::size_t thread_count();

// Calls body(i) for every i in [0, n). Work is split into contiguous chunks;
// callers write results by index so output never depends on scheduling.
// Nested calls from inside a body run serially. The first exception thrown by any chunk is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace isw
