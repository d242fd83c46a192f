// Copyright 2026 The remixsep Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#ifndef REMIXSEP_UTIL_PARALLEL_H_
#define REMIXSEP_UTIL_PARALLEL_H_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace remixsep {

// Runs fn(i) for i in [0, n). Each index writes only its own outputs, so the
// result does not depend on how indices are spread over threads. The first
// exception raised by any index is rethrown on the calling thread.
inline void ParallelFor(size_t n, const std::function<void(size_t)>& fn,
                        size_t max_threads = 0) {
  size_t hw = std::max<size_t>(1, std::thread::hardware_concurrency());
  size_t threads = std::min(n, max_threads == 0 ? hw : max_threads);
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (size_t i = w; i < n; i += threads) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace remixsep

#endif  // REMIXSEP_UTIL_PARALLEL_H_
