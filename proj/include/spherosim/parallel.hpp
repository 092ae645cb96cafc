#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace spherosim {

// Global worker count for per-vertex / per-triangle maps. Default 1.
void set_threads(int n);
int threads();

// Runs body(i) for i in [0, n). Iterations must be independent; results are
// identical for any thread count because each index writes its own slot.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  const int nt = threads();
  if (nt <= 1 || n < 2048) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  const std::size_t chunk = (n + static_cast<std::size_t>(nt) - 1) / static_cast<std::size_t>(nt);
  for (int t = 0; t < nt; ++t) {
    const std::size_t lo = static_cast<std::size_t>(t) * chunk;
    const std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &body] {
      for (std::size_t i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

// Fixed-tree pairwise summation of term(i), i in [0, n). The tree shape depends
// only on n, so the result is bit-reproducible.
template <class T, class Term>
T pairwise_sum(std::size_t lo, std::size_t hi, const Term& term, T zero) {
  const std::size_t len = hi - lo;
  if (len <= 16) {
    T acc = zero;
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    return acc;
  }
  const std::size_t mid = lo + len / 2;
  T a = pairwise_sum<T>(lo, mid, term, zero);
  a += pairwise_sum<T>(mid, hi, term, zero);
  return a;
}

template <class T, class Term>
T pairwise_sum(std::size_t n, const Term& term, T zero) {
  return pairwise_sum<T>(0, n, term, zero);
}

}  // namespace spherosim
