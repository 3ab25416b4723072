#pragma once
#include <cstdint>

namespace dynrank {

// SplitMix64: 64-bit seeded, splittable, identical output on every platform
// and toolchain. All randomized components (batch generation, synthetic
// graphs, seed derivation) draw from this so experiments replay exactly.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased uniform draw from [0, bound) via rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) return 0;
    std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % bound);
    std::uint64_t x;
    do { x = next(); } while (x >= limit);
    return x % bound;
  }

  // Independent stream for a sub-task, keyed by a caller-chosen tag.
  SplitMix64 split(std::uint64_t tag) {
    return SplitMix64(next() ^ (tag * 0xd6e8feb86659fd93ULL));
  }

  static constexpr const char* algorithm_name() { return "splitmix64"; }

 private:
  std::uint64_t state_;
};

}  // namespace dynrank
