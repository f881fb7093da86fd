#pragma once

#include <cstddef>
#include <functional>

namespace patsvd {

/// Worker count: PATSVD_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, n) on up to thread_count() threads. Iterations must
/// be independent. The first exception thrown by any iteration is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace patsvd
