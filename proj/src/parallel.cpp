#include "ncml/parallel.hpp"

#include <atomic>
#include <thread>
#include <vector>

namespace ncml {

namespace {
std::atomic<int> g_threads{1};
}

int thread_count() { return g_threads.load(); }

void set_thread_count(int n) {
  if (n < 1) n = 1;
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw > 0 && n > 4 * hw) n = 4 * hw;
  g_threads.store(n);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  int workers = g_threads.load();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (static_cast<std::size_t>(workers) > n) workers = static_cast<int>(n);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace ncml
