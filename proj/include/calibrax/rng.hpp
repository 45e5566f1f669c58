#pragma once

#include <cstdint>
#include <random>

namespace calibrax {

// Seeded generator with platform-independent output. The engine is
// std::mt19937_64, whose sequence is fixed by the standard; every
// distribution layered on top is implemented here rather than taken from
// <random>, whose distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // 53-bit uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // 53-bit uniform in (0, 1).
  double uniform_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Unbiased integer in [0, bound) by rejection. bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  // Standard normal, Marsaglia polar method.
  double normal();

  // Bernoulli draw: 1 iff next_u64() / 2^64 < p.
  int bernoulli(double p) {
    return static_cast<double>(next_u64()) * 0x1.0p-64 < p ? 1 : 0;
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x);

// Order-sensitive mix of several integers into one 64-bit seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c);

}  // namespace calibrax
