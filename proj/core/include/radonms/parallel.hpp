#pragma once

#include <cstddef>
#include <functional>

namespace radonms {

/// Number of worker threads used by parallel_for. 0 means "hardware concurrency".
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, n) across worker threads. Each index is handled by
/// exactly one call, so results are schedule-independent as long as body only
/// writes to slots owned by i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace radonms
