#pragma once

#include <cstddef>
#include <functional>

namespace trimci {

/// Global worker-thread count (defaults to hardware concurrency).
int thread_count();
void set_thread_count(int n);

// Runs fn(begin, end, block_index) over a block partition of [0, n).
// Results must be merged by the caller in a fixed order (by block index or
// by a canonical sort) so that output does not depend on scheduling.
void parallel_blocks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, int)>& fn);

/// Number of blocks parallel_blocks will use for a range of size n.
int block_count_for(std::size_t n);

}  // namespace trimci
