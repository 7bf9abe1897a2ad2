#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace splitsim {

// Deterministic random stream. All distributions are hand-rolled on top of
// std::mt19937_64 so that a given seed yields the same sequence on every
// platform (the standard library distribution objects are
// implementation-defined and would break byte-identical traces).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent substream derived from a master seed and a stream tag.
  // Streams with different tags never share state, so e.g. the population
  // sampler cannot perturb the fading sequence.
  static Rng derive(std::uint64_t master_seed, std::string_view tag);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random mantissa bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform integer in [lo, hi], inclusive. Rejection sampling keeps the
  // result unbiased and the sequence reproducible.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Exponential with unit mean.
  double exponential();

 private:
  std::mt19937_64 engine_;
};

// 64-bit FNV-1a, used for stream tags and file checksums.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace splitsim
