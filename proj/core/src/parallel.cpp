#include "cvxlines/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace cvxlines {
namespace {

std::atomic<unsigned> g_threads{0};

}  // namespace

unsigned thread_count() noexcept {
  const unsigned t = g_threads.load(std::memory_order_relaxed);
  if (t != 0) return t;
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_thread_count(unsigned threads) noexcept {
  g_threads.store(threads, std::memory_order_relaxed);
}

void parallel_chunks(std::size_t count, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  chunks = std::clamp<std::size_t>(chunks, 1, count);
  const std::size_t workers = std::min<std::size_t>(thread_count(), chunks);
  if (workers <= 1) {
    body(0, count);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::size_t per = (count + chunks - 1) / chunks;
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      const std::size_t b = c * per;
      const std::size_t e = std::min(count, b + per);
      if (b >= e) continue;
      try {
        body(b, e);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace cvxlines
