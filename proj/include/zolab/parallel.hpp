#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace zolab {

unsigned default_workers();

// Splits [0, count) into contiguous chunks and runs fn(chunk, begin, end) on
// up to `workers` threads. Chunk boundaries depend only on `chunks`, so
// callers that reduce per-chunk results in chunk order get the same answer
// for any worker count. The first exception thrown by any chunk is rethrown.
template <typename Fn>
void parallel_chunks(std::uint64_t count, std::size_t chunks, unsigned workers, Fn&& fn) {
  if (count == 0) return;
  chunks = std::max<std::size_t>(1, std::min<std::uint64_t>(chunks, count));
  auto bounds = [&](std::size_t c) { return count * c / chunks; };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(chunks)));

  if (workers == 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c, bounds(c), bounds(c + 1));
    return;
  }

  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t c = w; c < chunks; c += workers) fn(c, bounds(c), bounds(c + 1));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace zolab
