#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace mrx {

/// Splits [0, count) into `threads` contiguous chunks and runs fn(begin, end, worker) on each.
/// Chunk boundaries depend only on (count, threads); callers merge per-worker results in worker order.
template <class Fn>
void parallel_chunks(std::uint64_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::uint64_t>(count, 1))));
  if (threads == 1) {
    fn(std::uint64_t{0}, count, 0u);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  for (unsigned w = 0; w < threads; ++w) {
    const std::uint64_t b = count * w / threads, e = count * (w + 1) / threads;
    pool.emplace_back([&, b, e, w] {
      try {
        fn(b, e, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace mrx
