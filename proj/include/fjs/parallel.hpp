#pragma once

#include <cstddef>
#include <functional>

namespace fjs {

// Worker count used by per-node loops. Every parallel loop in the library
// writes disjoint outputs with a fixed per-node summation order, so results
// are bitwise identical for any worker count. Reductions stay serial.
void set_thread_count(unsigned count);
unsigned thread_count();

// Runs body(begin, end) over [0, n) split into contiguous chunks. Falls back
// to a single call below a size threshold.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace fjs
