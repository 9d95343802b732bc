//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "bmri/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace bmri {

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)> &fn) {
  if (count == 0)
    return;
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next { 0 };
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count)
        return;
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t nw =
      std::min<std::size_t>(std::max(threads, 1u), count);
  if (nw == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nw - 1);
    for (std::size_t t = 1; t < nw; ++t)
      pool.emplace_back(worker);
    worker();
    for (auto &th : pool)
      th.join();
  }
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
}

unsigned default_threads() noexcept {
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace bmri
