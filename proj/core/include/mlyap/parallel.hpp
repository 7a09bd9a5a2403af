#pragma once

#include <cstddef>
#include <functional>

namespace mlyap {

/// Number of workers to use for a request of `threads` (0 = hardware
/// concurrency), never more than `work_items`.
[[nodiscard]] unsigned resolve_threads(unsigned threads, std::size_t work_items);

/// Calls body(i) for every i in [0, count) using up to `threads` workers.
/// Indices are claimed dynamically, so body must write only to slot i of
/// any shared output. The first exception thrown by a worker is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace mlyap
