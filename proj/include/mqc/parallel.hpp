#pragma once

#include <cstddef>
#include <functional>

namespace mqc {

/// Process-wide worker count used by parallel loops (default: hardware concurrency).
int worker_count();
void set_worker_count(int workers);

/// Calls body(i) for i in [0, count) on up to worker_count() threads. Each index
/// is visited exactly once; results must go to per-index slots so the outcome
/// does not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Splits [0, count) into contiguous chunks, one call per chunk.
void parallel_chunks(std::size_t count, std::size_t min_chunk,
                     const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace mqc
