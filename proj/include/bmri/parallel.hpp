//
// bmri - Copyright 2026 The bmri Authors.
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <functional>

namespace bmri {

/// Runs fn(0), ..., fn(count - 1) on up to `threads` workers. Indices are
/// handed out in increasing order. If any call throws, the exception of the
/// lowest failing index is rethrown after all workers have stopped.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)> &fn);

/// std::thread::hardware_concurrency with a floor of one.
unsigned default_threads() noexcept;

}  // namespace bmri
