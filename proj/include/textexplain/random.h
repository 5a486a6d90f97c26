#ifndef TEXTEXPLAIN_RANDOM_H_
#define TEXTEXPLAIN_RANDOM_H_

#include <cstdint>
#include <random>

namespace textexplain {

using Rng = std::mt19937_64;

// SplitMix64 finalizer over (master, index). Used to give every document or
// run its own stream, independent of scheduling order.
inline uint64_t DeriveSeed(uint64_t master, uint64_t index) {
  uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace textexplain

#endif  // TEXTEXPLAIN_RANDOM_H_
