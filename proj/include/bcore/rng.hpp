#pragma once

#include <cassert>
#include <cstdint>
#include <random>

namespace bcore {

// One stream per run. Bounded draws go through next_below, an explicit
// rejection sampler, because std::uniform_int_distribution is allowed to
// differ between standard library implementations and we promise
// byte-identical reruns for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, n). Unbiased: discards raw draws below 2^64 mod n.
  std::uint64_t next_below(std::uint64_t n) {
    assert(n > 0);
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return r % n;
    }
  }

 private:
  std::mt19937_64 engine_;
};

// splitmix64 finalizer; bijective on u64.
std::uint64_t mix64(std::uint64_t x);

// Fans a master seed out into independent per-(a, b) streams, e.g.
// (instance index, run index) inside a sweep.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b);

}  // namespace bcore
