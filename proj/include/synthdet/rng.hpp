#pragma once

#include <cstdint>

namespace synthdet {

// One splitmix64 step. Advances the state and returns the mixed output.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Per-frame (or per-pixel, per-record) seed derivation:
// seed_i = splitmix64(master ^ (index + 1)). Bit-exact on every platform.
inline std::uint64_t derive_frame_seed(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t s = master_seed ^ (index + 1);
  return splitmix64_next(s);
}

// Deterministic 64-bit generator with fully specified output mapping,
// so identical seeds give identical streams regardless of platform or
// standard-library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64_next(state_); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  // Uniform integer in [lo, hi] inclusive.
  std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
    return lo + next_u64() % (hi - lo + 1);
  }

 private:
  std::uint64_t state_;
};

}  // namespace synthdet
