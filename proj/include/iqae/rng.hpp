// Pseudorandom streams for reproducible Monte Carlo campaigns.
//
// Stream derivation (recorded in output metadata):
//   stream_seed = mix64(master_seed + 0x9E3779B97F4A7C15 * (task_index + 1))
// where mix64 is the splitmix64 finalizer. The xoshiro256++ state is then
// filled with four successive splitmix64 outputs from stream_seed. The same
// (master_seed, task_index) pair always yields the same bit stream, so tasks
// can be scheduled in any order on any number of threads.
#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace iqae {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer (a bijection on 64-bit values).
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

 private:
  std::uint64_t state_;
};

// xoshiro256++ by Blackman and Vigna.
class Xoshiro256pp {
 public:
  explicit constexpr Xoshiro256pp(std::uint64_t seed) : state_{} {
    SplitMix64 sm(seed);
    for (auto& word : state_) word = sm.next();
  }

  constexpr std::uint64_t next() {
    const std::uint64_t result = std::rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = std::rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  constexpr double next_double() {
    return double(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::array<std::uint64_t, 4> state_;
};

inline constexpr std::uint64_t derive_stream_seed(std::uint64_t master_seed,
                                                  std::uint64_t task_index) {
  return mix64(master_seed + kGoldenGamma * (task_index + 1));
}

inline constexpr Xoshiro256pp derive_stream(std::uint64_t master_seed,
                                            std::uint64_t task_index) {
  return Xoshiro256pp(derive_stream_seed(master_seed, task_index));
}

// A master seed plus the fixed derivation rule above.
struct SeedPlan {
  std::uint64_t master_seed = 0;

  Xoshiro256pp stream(std::uint64_t task_index) const {
    return derive_stream(master_seed, task_index);
  }
};

}  // namespace iqae
