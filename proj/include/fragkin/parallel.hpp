#pragma once

#include <cstddef>
#include <functional>

namespace fragkin {

/// Runs body(begin, end, worker) over contiguous chunks of [0, n) on up to
/// `threads` workers.  Chunk boundaries depend only on n and threads, so any
/// per-index result is independent of scheduling.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t begin, std::size_t end, unsigned worker)>& body);

}  // namespace fragkin
