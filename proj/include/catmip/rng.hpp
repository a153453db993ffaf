#pragma once

#include <cstdint>

namespace catmip {

/* Deterministic 64-bit generator (splitmix64).  Every randomized piece of the
 * toolchain draws from this generator so that a fixed seed reproduces output
 * byte for byte on any platform.
 *
 *   state' = state + 0x9E3779B97F4A7C15
 *   z = state'; z = (z ^ z>>30) * 0xBF58476D1CE4B9B9
 *   z = (z ^ z>>27) * 0x94D049BB133111EB; out = z ^ z>>31
 *
 * split(tag) derives an independent child stream as
 * SplitMix64(mix(seed ^ (tag+1) * 0x9E3779B97F4A7C15)) where mix is one
 * output step; callers use fixed tags per purpose.
 */
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed), seed_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4B9B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 bits of precision.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n).  Modulo reduction; the bias is irrelevant here and the
  // result is identical on every platform, which is what matters.
  std::uint64_t next_below(std::uint64_t n) { return next() % n; }

  bool next_bool(double p) { return next_unit() < p; }

  SplitMix64 split(std::uint64_t tag) const {
    std::uint64_t s = seed_ ^ ((tag + 1) * 0x9E3779B97F4A7C15ull);
    s += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4B9B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return SplitMix64(z ^ (z >> 31));
  }

 private:
  std::uint64_t state_;
  std::uint64_t seed_;
};

}  // namespace catmip
