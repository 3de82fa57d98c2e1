#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace agiqa::nn {

// Seeded generator with every derived distribution pinned in this file.
// The standard <random> distributions are implementation-defined, so none are
// used: splits and synthetic data must agree across toolchains.
//
// Engine: std::mt19937_64 (the 10000th draw from the default seed is
// 9981545732273789042 on every conforming implementation).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Top 53 bits scaled to [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller, cosine branch only (one normal per two uniforms).
  double normal();

  // Uniform integer in [0, bound) by plain modulo reduction.
  std::uint64_t below(std::uint64_t bound) { return engine_() % bound; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// FNV-1a 64-bit.
std::uint64_t fnv1a(std::string_view s) noexcept;

// Independent child seed for a named purpose ("init", "shuffle", ...).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view purpose) noexcept;

}  // namespace agiqa::nn
