#pragma once

#include <cstdint>
#include <cstdlib>
#include <random>
#include <thread>
#include <vector>

namespace shiftlab {

// Worker count: hardware concurrency capped by SHIFTLAB_THREADS.
inline unsigned thread_cap() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SHIFTLAB_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1 && static_cast<unsigned long>(cap) < n) n = static_cast<unsigned>(cap);
  }
  return n;
}

// Calls fn(i) for i in [0, count) on up to thread_cap() threads. fn must only
// write to slots owned by i.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  unsigned workers = std::min<std::size_t>(thread_cap(), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent engine for stream `index` of `seed`; results never depend on
// how streams are spread over threads.
inline std::mt19937_64 rng_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(seed)),
                    static_cast<std::uint32_t>(splitmix64(seed) >> 32),
                    static_cast<std::uint32_t>(splitmix64(index ^ 0xa5a5a5a5a5a5a5a5ULL)),
                    static_cast<std::uint32_t>(splitmix64(index ^ 0xa5a5a5a5a5a5a5a5ULL) >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace shiftlab
