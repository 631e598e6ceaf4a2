#pragma once

#include <cstddef>
#include <functional>

namespace qmx {

/// Worker-thread cap: QMX_THREADS when set (>=1), otherwise 1.
int worker_threads();

/// Splits [begin, end) into contiguous chunks, one per worker. Each index is
/// processed exactly once by exactly one thread; with a single worker this is
/// a plain loop. Deterministic output independent of the thread count as long
/// as chunks write disjoint data.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t, std::size_t)>& chunk);

}  // namespace qmx
