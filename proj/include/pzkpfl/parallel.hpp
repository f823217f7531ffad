// Copyright 2026 The pzkpfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace pzkpfl {

// Runs fn(i) for i in [0, n) on up to `workers` threads (0 = hardware
// concurrency). The first exception thrown by any task is rethrown after all
// threads join.
void parallel_for(size_t n, const std::function<void(size_t)>& fn, size_t workers = 0);

size_t default_workers();

}  // namespace pzkpfl
