#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace tsallis {

// Worker count used by parallel_for. 0 selects hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

// Work is cut into fixed blocks of this many indices regardless of thread
// count, so any per-block result is independent of the degree of parallelism.
inline constexpr std::size_t kBlockSize = 1024;

// Calls body(begin, end) for every block of [0, n). Blocks may run
// concurrently. If bodies throw, the exception of the lowest block is
// rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

// Pairwise (cascade) summation in a fixed order.
double pairwise_sum(std::span<const double> x);

}  // namespace tsallis
