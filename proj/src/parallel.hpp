// Copyright 2026 The catreverse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CATREVERSE_PARALLEL_HPP
#define CATREVERSE_PARALLEL_HPP

#include <cstdint>
#include <vector>

namespace catrev {

// Number of worker threads used by data-parallel kernels. Defaults to the
// OpenMP default, capped by the CATREVERSE_THREADS environment variable.
int thread_count();

// Sets the worker count (clamped to [1, cap]); returns the value in effect.
int set_thread_count(int requested);

// Reads CATREVERSE_THREADS; returns 0 when unset or unparsable.
int env_thread_cap();

// Sets flush-to-zero and denormals-are-zero for the calling thread. Long
// noisy runs leave many amplitudes near 1e-310, where subnormal arithmetic
// would otherwise dominate the kernels.
void enable_flush_to_zero() noexcept;

// Applies fn(k) for k in [0, n). Iterations must touch disjoint data.
template <class Fn>
void parallel_for(uint64_t n, Fn&& fn) {
  const auto count = static_cast<int64_t>(n);
#pragma omp parallel num_threads(thread_count())
  {
    enable_flush_to_zero();
#pragma omp for schedule(static)
    for (int64_t k = 0; k < count; ++k) {
      fn(static_cast<uint64_t>(k));
    }
  }
}

// Applies fn(lo, hi) over consecutive chunks of [0, n). Used by kernels whose
// inner loop benefits from hoisting loop invariants out of the chunk.
template <class Fn>
void parallel_chunks(uint64_t n, uint64_t chunk, Fn&& fn) {
  const uint64_t chunks = (n + chunk - 1) / chunk;
  parallel_for(chunks, [&](uint64_t c) {
    const uint64_t lo = c * chunk;
    fn(lo, lo + chunk < n ? lo + chunk : n);
  });
}

// Block size for deterministic reductions. The partition of [0, n) into
// blocks is independent of the thread count, and partial sums are combined
// serially in block order, so results are bit-identical for any worker count.
inline constexpr uint64_t kReductionBlock = uint64_t{1} << 12;

template <class T, class Fn>
T deterministic_sum(uint64_t n, Fn&& term) {
  const uint64_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  std::vector<T> partial(blocks, T{});
  parallel_for(blocks, [&](uint64_t b) {
    const uint64_t lo = b * kReductionBlock;
    const uint64_t hi = lo + kReductionBlock < n ? lo + kReductionBlock : n;
    T acc{};
    for (uint64_t k = lo; k < hi; ++k) acc += term(k);
    partial[b] = acc;
  });
  T total{};
  for (const T& p : partial) total += p;
  return total;
}

}  // namespace catrev

#endif  // CATREVERSE_PARALLEL_HPP
