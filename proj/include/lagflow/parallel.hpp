#pragma once

#include <cstddef>
#include <functional>

namespace lagflow {

// Worker count: hardware concurrency, capped by LAGFLOW_THREADS when set.
int worker_count();

// Splits [0, count) into contiguous chunks and runs body(begin, end) on each.
// Chunks are fixed by count and worker_count(), so per-point results never
// depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace lagflow
