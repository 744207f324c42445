#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace qnl {

// Thrown when a requested computation exceeds the configured compute or
// memory budget.  The CLI maps this to its own exit code.
class budget_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown when a randomized stage exhausts its retry cap without producing
// an acceptable result.
class retry_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for pipeline stage `stage`, derived from the run's master seed.
/// Recorded in certificates so randomized stages can be replayed.
inline std::uint64_t stage_seed(std::uint64_t master, std::uint64_t stage) {
  std::uint64_t s = master ^ (0xa0761d6478bd642fULL * (stage + 1));
  return splitmix64(s);
}

/// Deterministic RNG over a splitmix64 stream.  Bounded draws use rejection
/// sampling instead of std::uniform_int_distribution, so identical seeds
/// give identical streams on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() { return splitmix64(state_); }

  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below(0)");
    std::uint64_t mask = ~std::uint64_t{0};
    if ((n & (n - 1)) == 0) return next() & (n - 1);
    std::uint64_t limit = mask - mask % n;
    for (;;) {
      std::uint64_t x = next();
      if (x < limit) return x % n;
    }
  }

  bool coin() { return (next() >> 63) != 0; }

  double unit() { return double(next() >> 11) * 0x1.0p-53; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::uint64_t state_;
};

/// Worker cap: hardware concurrency, clamped by the QNL_THREADS env var.
inline unsigned thread_budget() {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* s = std::getenv("QNL_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end != s && v >= 1 && v < 4096) hw = std::min<unsigned>(hw, unsigned(v));
  }
  return hw;
}

struct ChunkPlan {
  std::uint64_t count = 1;
  std::uint64_t per = 0;
};

inline ChunkPlan plan_chunks(std::uint64_t n, std::uint64_t grain = 1 << 14) {
  ChunkPlan cp;
  unsigned T = thread_budget();
  if (n == 0) return {0, 0};
  if (T <= 1 || n <= grain) return {1, n};
  cp.count = std::min<std::uint64_t>(T, (n + grain - 1) / grain);
  cp.per = (n + cp.count - 1) / cp.count;
  cp.count = (n + cp.per - 1) / cp.per;
  return cp;
}

/// Runs fn(chunk, lo, hi) over [0, n) split per plan_chunks.  Results that
/// need reduction should be accumulated per chunk and merged by the caller;
/// merged order must not affect the outcome (max/min reductions are fine).
template <class Fn>
inline void parallel_chunks(std::uint64_t n, Fn&& fn, std::uint64_t grain = 1 << 14) {
  ChunkPlan cp = plan_chunks(n, grain);
  if (cp.count == 0) return;
  if (cp.count == 1) {
    fn(std::uint64_t{0}, std::uint64_t{0}, n);
    return;
  }
  std::vector<std::thread> ts;
  ts.reserve(cp.count);
  for (std::uint64_t c = 0; c < cp.count; ++c) {
    std::uint64_t lo = c * cp.per, hi = std::min(n, lo + cp.per);
    ts.emplace_back([&fn, c, lo, hi] { fn(c, lo, hi); });
  }
  for (auto& t : ts) t.join();
}

/// p^e with overflow check (throws std::overflow_error).
inline std::uint64_t ipow_checked(std::uint64_t base, std::uint64_t exp) {
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    acc *= base;
    if (acc > (unsigned __int128)UINT64_MAX)
      throw std::overflow_error("integer power overflows 64 bits");
  }
  return std::uint64_t(acc);
}

/// Wraps an angle into (-pi, pi].
inline double wrap_pm_pi(double x) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  double y = std::fmod(x, two_pi);
  if (y > 3.14159265358979323846) y -= two_pi;
  if (y <= -3.14159265358979323846) y += two_pi;
  return y;
}

}  // namespace qnl
