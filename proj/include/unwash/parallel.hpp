#pragma once

#include <cstddef>
#include <functional>

namespace unwash {

// Thread count resolution: explicit request wins, then UNWASH_THREADS, then
// hardware concurrency. requested <= 0 means "auto".
int resolve_threads(int requested);

// Runs fn over contiguous index ranges covering [begin, end). Workers write
// only to their own slots; callers reduce serially afterwards so results do
// not depend on the thread count.
void parallel_for(std::size_t begin, std::size_t end, int threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace unwash
