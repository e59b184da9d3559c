#pragma once

#include <cstdint>
#include <random>

#include "itrain/types.hpp"

namespace itrain {

// splitmix64 step; used both for seeding and for deriving substream keys.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derives an independent 64-bit key for substream `index` of `master`.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master;
  std::uint64_t mixed = splitmix64(s) ^ (index * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
  return splitmix64(mixed);
}

// xoshiro256++ with splitmix64 state fill. Cheap to construct, so every
// Monte Carlo trial gets its own stream keyed by (master seed, trial index);
// results are then independent of execution order.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed = 0) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type(0); }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

inline Xoshiro256pp trial_stream(std::uint64_t master_seed, std::uint64_t trial_index) {
  return Xoshiro256pp(derive_seed(master_seed, trial_index));
}

// Draws from CN(0, 1): real and imaginary parts are N(0, 1/2).
template <class Rng>
Complex complex_normal(Rng& rng, std::normal_distribution<double>& dist) {
  const double re = dist(rng);
  const double im = dist(rng);
  return Complex(re, im);
}

template <class Rng>
Vector complex_normal_vector(Rng& rng, Index n) {
  std::normal_distribution<double> dist(0.0, 0.7071067811865476);
  Vector g(n);
  for (Index i = 0; i < n; ++i) g(i) = complex_normal(rng, dist);
  return g;
}

}  // namespace itrain
