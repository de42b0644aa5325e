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

#include "parallel.hpp"

#include <omp.h>

#if defined(__SSE2__)
#include <pmmintrin.h>
#include <xmmintrin.h>
#endif

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <cstring>

namespace catrev {
namespace {

std::atomic<int> g_threads{0};

int default_threads() {
  int n = omp_get_max_threads();
  const int cap = env_thread_cap();
  if (cap > 0) n = std::min(n, cap);
  return std::max(n, 1);
}

}  // namespace

void enable_flush_to_zero() noexcept {
#if defined(__SSE2__)
  _MM_SET_FLUSH_ZERO_MODE(_MM_FLUSH_ZERO_ON);
  _MM_SET_DENORMALS_ZERO_MODE(_MM_DENORMALS_ZERO_ON);
#endif
}

int env_thread_cap() {
  const char* raw = std::getenv("CATREVERSE_THREADS");
  if (raw == nullptr) return 0;
  int value = 0;
  const char* end = raw + std::strlen(raw);
  auto [ptr, ec] = std::from_chars(raw, end, value);
  if (ec != std::errc{} || ptr != end || value < 1) return 0;
  return value;
}

int thread_count() {
  int n = g_threads.load(std::memory_order_relaxed);
  if (n <= 0) {
    n = default_threads();
    g_threads.store(n, std::memory_order_relaxed);
  }
  return n;
}

int set_thread_count(int requested) {
  int n = std::max(requested, 1);
  const int cap = env_thread_cap();
  if (cap > 0) n = std::min(n, cap);
  g_threads.store(n, std::memory_order_relaxed);
  return n;
}

}  // namespace catrev
