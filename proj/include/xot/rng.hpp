#pragma once

#include <cstdint>

namespace xot {

// Counter-based generator: each draw hashes (seed, stream, counter), so
// transcripts are bit-reproducible and streams are independent per role.
class Rng {
 public:
  Rng(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}

  uint64_t next_u64() {
    uint64_t z = seed_ + 0x9E3779B97F4A7C15ULL * (stream_ + 1) + counter_++;
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // uniform in [0,1) with 53 random bits
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // uniform in {0,...,n-1} via rejection
  int randint(int n) {
    const uint64_t bound = UINT64_MAX - UINT64_MAX % static_cast<uint64_t>(n);
    uint64_t v;
    do {
      v = next_u64();
    } while (v >= bound);
    return static_cast<int>(v % static_cast<uint64_t>(n));
  }

  bool bernoulli(double p) { return uniform() < p; }

  uint64_t counter() const { return counter_; }

 private:
  uint64_t seed_;
  uint64_t stream_;
  uint64_t counter_ = 0;
};

}  // namespace xot
