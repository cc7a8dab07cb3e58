#pragma once

#include <cstddef>
#include <functional>

namespace plad {

/// Worker count: hardware concurrency, capped by the PLAD_THREADS
/// environment variable when it holds a positive integer.
std::size_t worker_count();

/// Calls body(i) for every i in [0, count) on up to worker_count() threads.
/// Indices are handed out dynamically, so body must not depend on which
/// thread runs it. The first exception thrown by body is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace plad
