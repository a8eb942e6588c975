#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace photongun::rng {

// SplitMix64 step, used to derive substream seeds from one root seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Each randomness consumer draws from its own engine, so enabling or
// disabling one channel never shifts another channel's draws.
enum class Stream : std::uint64_t {
  emission = 1,
  loss = 2,
  background = 3,
  split = 4,
  synthetic = 5,
};

inline std::uint64_t substream_seed(std::uint64_t root, Stream s) {
  std::uint64_t state = root ^ (0xa0761d6478bd642full * static_cast<std::uint64_t>(s));
  return splitmix64(state);
}

// Samplers are built only on the mt19937_64 output sequence (which the
// standard pins down bit-for-bit), not on std::*_distribution, so seeded
// streams reproduce across standard-library implementations.
class Engine {
 public:
  explicit Engine(std::uint64_t seed) : gen_(seed) {}

  static Engine for_stream(std::uint64_t root, Stream s) {
    return Engine(substream_seed(root, s));
  }

  std::uint64_t bits() { return gen_(); }

  // Uniform on [0, 1), 53 bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Exponential with the given mean; 0 is possible, +inf is not.
  double exponential(double mean) { return -mean * std::log1p(-uniform01()); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace photongun::rng
