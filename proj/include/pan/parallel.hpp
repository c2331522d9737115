#ifndef PAN_PARALLEL_HPP
#define PAN_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <utility>
#include <vector>

#include <omp.h>

namespace pan {

// Work is cut into fixed-size blocks of items; each block produces a partial
// result and partials are folded in block order. The block size never depends
// on the worker count, so any thread count (including the serial reference
// path, threads == 1) yields bit-identical results.
//
// block_fn(first, last) -> Partial, items [first, last)
// combine(Partial&&) is called for block 0, 1, 2, ... in order.
template <class Partial, class BlockFn, class CombineFn>
void blocked_reduce_ordered(std::size_t count, std::size_t block_size, int threads,
                            BlockFn&& block_fn, CombineFn&& combine) {
  if (count == 0) return;
  if (block_size == 0) block_size = 1;
  const std::size_t nblocks = (count + block_size - 1) / block_size;

  if (threads == 1 || nblocks == 1) {
    // serial reference implementation
    for (std::size_t b = 0; b < nblocks; ++b) {
      const std::size_t first = b * block_size;
      const std::size_t last = std::min(count, first + block_size);
      combine(block_fn(first, last));
    }
    return;
  }

  std::vector<Partial> partials(nblocks);
  if (threads <= 0) threads = omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
    const std::size_t first = static_cast<std::size_t>(b) * block_size;
    const std::size_t last = std::min(count, first + block_size);
    partials[static_cast<std::size_t>(b)] = block_fn(first, last);
  }
  for (std::size_t b = 0; b < nblocks; ++b) combine(std::move(partials[b]));
}

inline int resolve_threads(int threads) {
  return threads <= 0 ? omp_get_max_threads() : threads;
}

}  // namespace pan

#endif
