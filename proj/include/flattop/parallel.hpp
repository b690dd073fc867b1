#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace flattop {

//! Number of workers to use when the caller asks for `requested` (0 = all
//! available cores).
inline unsigned
resolve_threads(unsigned requested)
{
  if (requested > 0) {
    return requested;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

//! Calls f(i) for i in [0, n) on up to `threads` workers. Work is handed out
//! index by index; callers write results into slot i so the outcome does not
//! depend on scheduling. The first exception thrown is rethrown.
template<class F>
void
parallel_for(std::size_t n, unsigned threads, F&& f)
{
  const unsigned workers =
    static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      f(i);
    }
    return;
  }

  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) {
        return;
      }
      try {
        f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) {
          error = std::current_exception();
        }
        next.store(n);
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back(run);
  }
  for (auto& t : pool) {
    t.join();
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

} // namespace flattop
