#pragma once

#include <cstddef>
#include <future>
#include <thread>
#include <vector>

namespace qgraph {

/// Runs fn(begin, end) over fixed index chunks. Results must be written to
/// per-index slots by the caller, which keeps output independent of the
/// thread count; with threads <= 1 the call degenerates to a plain loop.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    fn(static_cast<std::size_t>(0), n);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::future<void>> futs;
  futs.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = w * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    futs.push_back(std::async(std::launch::async, [lo, hi, &fn]() { fn(lo, hi); }));
  }
  for (auto& f : futs) f.get();
}

}  // namespace qgraph
