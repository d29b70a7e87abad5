#include "fjs/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace fjs {
namespace {

std::atomic<unsigned> g_threads{1};
constexpr std::size_t kMinParallelSize = std::size_t{1} << 15;

}  // namespace

void set_thread_count(unsigned count) { g_threads.store(std::max(1u, count)); }

unsigned thread_count() { return g_threads.load(); }

void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  const std::size_t workers =
      std::min<std::size_t>(thread_count(), std::max<std::size_t>(1, n / 4096));
  if (workers <= 1 || n < kMinParallelSize) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&body, begin, end] { body(begin, end); });
  }
  body(0, std::min(n, chunk));
}

}  // namespace fjs
