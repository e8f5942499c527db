#pragma once

#include <array>
#include <cstdint>

namespace ulamnet {

// splitmix64 (Steele, Lea, Flood); used for seeding and stream derivation.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Independent stream seed for a (master seed, stream index) pair. Streams
// derived this way may run on any thread without changing the result.
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64_next(s);
  s = a ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
  splitmix64_next(s);
  return splitmix64_next(s);
}

// xoshiro256++ (Blackman & Vigna). Output sequence depends only on the seed,
// not on the platform or standard library.
class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : state_) w = splitmix64_next(sm);
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
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
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace ulamnet
