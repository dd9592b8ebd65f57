// Chunked fork-join helpers. Chunk boundaries depend only on the range and
// the worker count, and reductions are max-only, so results never depend on
// scheduling.
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace bandext {

/// Worker count: BANDEXT_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("BANDEXT_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace detail {
// Below this many items per worker, threads cost more than they save.
inline constexpr std::size_t kMinChunk = 4096;
}  // namespace detail

/// Calls body(begin, end) over disjoint chunks of [0, n).
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const std::size_t workers =
      std::min<std::size_t>(worker_count(), std::max<std::size_t>(1, n / detail::kMinChunk));
  if (workers <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t b = std::min(n, w * chunk), e = std::min(n, b + chunk);
    pool.emplace_back([&body, b, e] { body(b, e); });
  }
  body(std::size_t{0}, std::min(n, chunk));
}

/// Max-reduce of body(begin, end) over chunks of [0, n); 0 for an empty range.
template <class Body>
double parallel_max(std::size_t n, Body&& body) {
  const std::size_t workers =
      std::min<std::size_t>(worker_count(), std::max<std::size_t>(1, n / detail::kMinChunk));
  if (workers <= 1) return n ? body(std::size_t{0}, n) : 0.0;
  std::vector<double> partial(workers, 0.0);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 1; w < workers; ++w) {
      const std::size_t b = std::min(n, w * chunk), e = std::min(n, b + chunk);
      pool.emplace_back([&body, &partial, w, b, e] { partial[w] = body(b, e); });
    }
    partial[0] = body(std::size_t{0}, std::min(n, chunk));
  }
  return *std::max_element(partial.begin(), partial.end());
}

}  // namespace bandext
