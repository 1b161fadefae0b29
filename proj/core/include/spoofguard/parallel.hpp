#pragma once

#include <cstddef>
#include <functional>

namespace spoofguard {

/// Worker count used by every parallel loop in the library.
/// 0 (the default) means std::thread::hardware_concurrency().
void set_thread_count(std::size_t n);
std::size_t thread_count();

/// Runs body(i) for i in [0, n). Iterations are handed out dynamically,
/// so bodies must write only to disjoint outputs; results are then
/// independent of the schedule and of the worker count.
/// The first exception thrown by any body is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace spoofguard
