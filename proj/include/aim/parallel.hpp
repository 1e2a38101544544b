// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace aim::par {

inline int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// 0 keeps the OpenMP default.
inline void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

inline constexpr size_t kDefaultBlock = 4096;

// Deterministic parallel reduction: [0, n) is cut into fixed-size blocks,
// each block is reduced serially into its own accumulator, and the partials
// are combined in block order. The result is bitwise identical for any
// thread count, including 1.
//
// BlockFn:   void(size_t begin, size_t end, Acc& acc)
// CombineFn: void(Acc& into, const Acc& from)
template <class Acc, class BlockFn, class CombineFn>
Acc blocked_reduce(size_t n, const Acc& init, BlockFn block_fn,
                   CombineFn combine, size_t block_size = kDefaultBlock) {
  if (n == 0) return init;
  size_t n_blocks = (n + block_size - 1) / block_size;
  std::vector<Acc> partials(n_blocks, init);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (long long b = 0; b < static_cast<long long>(n_blocks); ++b) {
    size_t begin = static_cast<size_t>(b) * block_size;
    size_t end = begin + block_size < n ? begin + block_size : n;
    block_fn(begin, end, partials[static_cast<size_t>(b)]);
  }
  Acc total = init;
  for (size_t b = 0; b < n_blocks; ++b) combine(total, partials[b]);
  return total;
}

// Parallel loop over independent items writing to disjoint slots.
template <class Fn>
void parallel_for(size_t n, Fn fn) {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1)
#endif
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    fn(static_cast<size_t>(i));
  }
}

}  // namespace aim::par
