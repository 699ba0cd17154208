#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace moutard {

// Number of worker threads to use for grid sweeps.  Controlled by the
// MOUTARD_THREADS environment variable (0 or unset means "hardware
// concurrency"); always at least 1.
inline unsigned thread_count() {
  unsigned n = 0;
  if (const char* env = std::getenv("MOUTARD_THREADS")) {
    try {
      long v = std::stol(env);
      if (v > 0) n = static_cast<unsigned>(v);
    } catch (...) {
      n = 0;
    }
  }
  if (n == 0) n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  return n;
}

// Evaluates fn(i) for every i in [0, n) and returns the results indexed by i.
// Work is split into contiguous chunks, one per thread, so the output is
// independent of the thread count: any reduction done afterwards in index
// order is fully deterministic.  fn must not throw; per-point failures should
// be encoded in the result type.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  unsigned workers = thread_count();
  if (workers <= 1 || n < 2 * workers) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::size_t chunk = (n + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t lo = static_cast<std::size_t>(w) * chunk;
    if (lo >= n) break;
    std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([&out, &fn, lo, hi] {
      for (std::size_t i = lo; i < hi; ++i) out[i] = fn(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace moutard
