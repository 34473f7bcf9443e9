#ifndef ALGOEVO_RNG_HPP
#define ALGOEVO_RNG_HPP

#include <array>
#include <cstdint>
#include <initializer_list>

namespace algoevo {

// All stochastic code in this library runs on the fixed generator below so
// that results are reproducible bit-for-bit across platforms and thread
// schedules. std::mt19937_64 itself is portable but the standard library
// distributions are not, so we ship our own draw primitives.

// SplitMix64 step (Steele, Lea, Vigna). Used for seed mixing and for
// expanding a single 64-bit seed into generator state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Derives a child seed from a master seed and a list of integer coordinates
// (replicate index, target index, arm index, ...). Every derived stream used
// by the experiment harness comes from this one function, so a manifest that
// records the master seed and the coordinates pins the entire computation.
inline std::uint64_t mix_seed(std::uint64_t master,
                              std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = master;
  for (std::uint64_t p : parts) {
    h ^= p * 0x9E3779B97F4A7C15ull + 0x7F4A7C15ull;
    (void)splitmix64(h);
    h = splitmix64(h);
  }
  return h;
}

// xoshiro256** 1.0 (Blackman, Vigna). Public-domain algorithm, fixed here as
// the library's generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). Fixed-point multiply-high reduction; the bias
  // is below n/2^64 which is irrelevant at the pool sizes used here, and the
  // mapping is exactly reproducible.
  std::uint64_t bounded(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  bool coin(double p) { return u01() < p; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::array<std::uint64_t, 4> state_;
};

}  // namespace algoevo

#endif  // ALGOEVO_RNG_HPP
