#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace iscan {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(i) for i in [0, n). Each index must write only to its own output
// slot; under that contract the result is identical for every thread count.
// Work is split by static striding so error propagation is deterministic too:
// the exception from the lowest worker id wins.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn) {
  std::size_t nw = static_cast<std::size_t>(resolve_threads(threads));
  if (n < 2 || nw < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  nw = std::min(nw, n);
  std::vector<std::exception_ptr> errors(nw);
  std::vector<std::thread> pool;
  pool.reserve(nw);
  for (std::size_t w = 0; w < nw; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += nw) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace iscan
