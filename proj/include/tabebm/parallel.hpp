#pragma once

#include <cstddef>
#include <functional>

namespace tabebm {

/// Caps the number of worker threads used by parallel loops. 0 restores the
/// default (hardware concurrency).
void set_max_threads(std::size_t n);
std::size_t max_threads();

/// Runs body(i) for i in [0, n). Work is split into contiguous chunks; every
/// index is processed exactly once, so results written by index do not depend
/// on the thread count. The first exception thrown by any worker is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace tabebm
