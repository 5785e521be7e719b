#pragma once

#include <cstddef>
#include <functional>

namespace taghash {

// Worker count from the THREADS environment variable (>= 1). Falls back to
// the hardware concurrency when unset or unparsable.
std::size_t thread_count();

// Runs fn(begin, end) over fixed-size chunks of [0, n). Chunk boundaries
// depend only on n and chunk, never on the worker count, so any per-chunk
// floating-point work is reproducible across THREADS settings.
void parallel_for_chunks(std::size_t n, std::size_t chunk,
                         const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace taghash
