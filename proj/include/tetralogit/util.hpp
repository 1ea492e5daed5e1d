#pragma once

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

namespace tetralogit {

// ---------------------------------------------------------------------------
// Logistic CDF and friends, stable for large |z|.
// ---------------------------------------------------------------------------

inline double logistic(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z))
inline double softplus(double z) {
  if (z > 35.0) return z;
  if (z < -35.0) return std::exp(z);
  return std::log1p(std::exp(z));
}

// Standard normal CDF.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// ---------------------------------------------------------------------------
// Quantiles with linear interpolation (R type 7), the convention used by the
// summary tables this library reproduces.
// ---------------------------------------------------------------------------

inline double quantile_sorted(std::span<const double> sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 0) return std::nan("");
  if (n == 1) return sorted[0];
  double h = static_cast<double>(n - 1) * p;
  std::size_t lo = static_cast<std::size_t>(std::floor(h));
  if (lo >= n - 1) return sorted[n - 1];
  double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

inline double quantile(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  return quantile_sorted(values, p);
}

// ---------------------------------------------------------------------------
// Counter-based RNG: a splitmix64 hash chain over (seed, rep, a, b, stream).
// Draws are a pure function of their key, so parallel replication order can
// never change the data.
// ---------------------------------------------------------------------------

namespace rng {

inline std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum Stream : std::uint64_t {
  kNodeType = 1,      // W_i draws
  kDyadUniform = 2,   // one uniform per dyad driving the ordered outcome
  kSenderJitter = 3,  // category-specific sender threshold noise
  kReceiverJitter = 4,
};

inline std::uint64_t key(std::uint64_t seed, std::uint64_t rep, std::uint64_t a,
                         std::uint64_t b, std::uint64_t stream) {
  std::uint64_t x = mix(seed ^ 0x243f6a8885a308d3ULL);
  x = mix(x ^ rep);
  x = mix(x ^ (a + 0x100000001b3ULL * b));
  x = mix(x ^ stream);
  return x;
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform(std::uint64_t seed, std::uint64_t rep, std::uint64_t a,
                      std::uint64_t b, std::uint64_t stream) {
  return static_cast<double>(key(seed, rep, a, b, stream) >> 11) *
         0x1.0p-53;
}

}  // namespace rng

// ---------------------------------------------------------------------------
// Deterministic block-parallel map: items are split into contiguous blocks,
// each block runs on one thread, and results are combined by the caller in
// block order so output never depends on the thread count.
// ---------------------------------------------------------------------------

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Number of blocks parallel_blocks will use for a given workload.
inline std::size_t plan_blocks(std::size_t n_items, int threads) {
  int t = resolve_threads(threads);
  if (t <= 1 || n_items <= 1) return 1;
  return std::min<std::size_t>(static_cast<std::size_t>(t) * 4, n_items);
}

// fn(block_index, begin, end) over [0, n_items)
template <typename Fn>
void parallel_blocks(std::size_t n_items, int threads, Fn&& fn) {
  int t = resolve_threads(threads);
  std::size_t n_blocks = plan_blocks(n_items, threads);
  if (n_blocks <= 1) {
    fn(0, std::size_t{0}, n_items);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(t));
  std::vector<std::size_t> starts(n_blocks + 1);
  for (std::size_t b = 0; b <= n_blocks; ++b) {
    starts[b] = n_items * b / n_blocks;
  }
  std::atomic<std::size_t> next{0};
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t b = next.fetch_add(1);
        if (b >= n_blocks) return;
        fn(b, starts[b], starts[b + 1]);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace tetralogit
