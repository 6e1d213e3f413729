#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace gffmod {

/// Worker count used when a call does not pass one. Initialised from the
/// GFFMOD_THREADS environment variable, else 1.
int default_threads();
void set_default_threads(int threads);

/// Runs f(0..count-1) on a pool of threads pulling indices from a shared
/// counter. Results are stored by index, so the output never depends on the
/// schedule. The first exception thrown by a task is rethrown.
template <class F>
auto parallel_map(std::size_t count, F&& f, int threads = 0) {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(count);
  if (threads <= 0) threads = default_threads();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace gffmod
