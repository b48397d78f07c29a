#pragma once

#include <cstddef>
#include <functional>

namespace depsel {

/// Worker count: DEPSEL_THREADS if set (>= 1), otherwise hardware concurrency.
std::size_t thread_budget();

/// Runs body(i) for i in [0, n), split into contiguous chunks over at most
/// thread_budget() threads. body must only write to slot i of its outputs.
/// The first exception thrown by any chunk is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace depsel
