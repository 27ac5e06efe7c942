#ifndef PENSIM_PARALLEL_HPP
#define PENSIM_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace pensim {

// Effective worker count: `requested` (0 = hardware), capped by the
// PENSIM_MAX_THREADS environment variable when set.
inline int effective_threads(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* cap = std::getenv("PENSIM_MAX_THREADS")) {
    const int c = std::atoi(cap);
    if (c >= 1 && c < n) n = c;
  }
  return n;
}

// Runs body(i) for i in [0, count) on a work-stealing index counter. Tasks
// own their state; results must be written to per-index slots so the
// reduction stays deterministic. The first exception is rethrown.
inline void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  const int workers = std::min(effective_threads(threads), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace pensim

#endif  // PENSIM_PARALLEL_HPP
