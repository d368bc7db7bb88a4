#include "trimci/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace trimci {

namespace {
std::atomic<int> g_threads{0};
}

int thread_count() {
  int n = g_threads.load(std::memory_order_relaxed);
  if (n <= 0) {
    n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
  }
  return n;
}

void set_thread_count(int n) { g_threads.store(n, std::memory_order_relaxed); }

int block_count_for(std::size_t n) {
  const int t = thread_count();
  if (t <= 1 || n < 2) return 1;
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(t), n));
}

void parallel_blocks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, int)>& fn) {
  if (n == 0) return;
  const int blocks = block_count_for(n);
  if (blocks == 1) {
    fn(0, n, 0);
    return;
  }
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(blocks));
  const std::size_t chunk = (n + static_cast<std::size_t>(blocks) - 1) / static_cast<std::size_t>(blocks);
  for (int b = 0; b < blocks; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    workers.emplace_back(fn, begin, end, b);
  }
  for (auto& w : workers) w.join();
}

}  // namespace trimci
