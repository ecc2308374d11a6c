#pragma once
// Embarrassingly parallel replica runner. Replicas are assigned to worker
// threads block-cyclically and each replica draws from its own derived RNG
// stream, so results do not depend on thread scheduling; per-thread partial
// results are merged in thread-index order.

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "hlpt/rng.hpp"

namespace hlpt {

inline unsigned default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

// results[i] = fn(i, replica_rng(seed, i)); fully deterministic.
template <class Fn>
void parallel_for_replicas(std::uint64_t n, std::uint64_t seed, Fn&& fn,
                           unsigned threads = 0) {
  if (threads == 0) threads = default_threads();
  if (threads == 1 || n < 2 * threads) {
    for (std::uint64_t i = 0; i < n; ++i) {
      Rng rng = replica_rng(seed, i);
      fn(i, rng);
    }
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::uint64_t i = t; i < n; i += threads) {
        Rng rng = replica_rng(seed, i);
        fn(i, rng);
      }
    });
  }
  for (auto& th : pool) th.join();
}

// Accumulates work(rng, acc) over n replicas into per-thread accumulators,
// merged in thread order.
template <class Acc>
Acc parallel_reduce(std::uint64_t n, std::uint64_t seed,
                    const std::function<void(Rng&, Acc&)>& work,
                    const std::function<void(Acc&, const Acc&)>& merge,
                    unsigned threads = 0) {
  if (threads == 0) threads = default_threads();
  std::vector<Acc> partial(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::uint64_t i = t; i < n; i += threads) {
        Rng rng = replica_rng(seed, i);
        work(rng, partial[t]);
      }
    });
  }
  for (auto& th : pool) th.join();
  Acc total{};
  for (const Acc& p : partial) merge(total, p);
  return total;
}

}  // namespace hlpt
