/* Copyright 2026 The gcgat Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Static chunking of [0, n) over a few threads. Each index is owned by exactly
// one worker, so results written per index do not depend on the thread count.

#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace gcgat {

// 0 picks the hardware concurrency; never more threads than work items.
inline std::size_t ResolveThreads(std::size_t requested, std::size_t work) {
  const std::size_t n =
      requested ? requested : std::max<std::size_t>(1, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, work));
}

// Calls fn(begin, end) on contiguous chunks. The first exception (in chunk
// order) is rethrown after every worker has joined.
template <typename Fn>
void ParallelChunks(std::size_t n, std::size_t requested_threads, Fn&& fn) {
  const std::size_t threads = ResolveThreads(requested_threads, n);
  if (threads <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        fn(std::min(n, w * chunk), std::min(n, (w + 1) * chunk));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace gcgat
