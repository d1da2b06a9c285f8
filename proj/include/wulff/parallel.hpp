#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace wulff {

/// Number of worker threads used by node-parallel kernels (default 1).
int worker_count();
void set_worker_count(int workers);

/// Runs body(i) for i in [0, count) across the configured workers.
/// Work is split into contiguous blocks; each index is touched by exactly
/// one worker, so per-index outputs never depend on the worker count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Pairwise (cascade) summation in a fixed order.
double pairwise_sum(std::span<const double> values);

} // namespace wulff
