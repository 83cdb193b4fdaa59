#ifndef EVONET_RNG_HPP
#define EVONET_RNG_HPP

#include <cstdint>
#include <random>

namespace evonet {

// Seeded generator used by every stochastic operation.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The bounded-integer and real mappings are implemented here rather
// than through <random> distributions, whose algorithms differ between
// standard library vendors; this keeps seeded runs bit-identical across
// toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform_real() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 engine_;
};

// Derives an independent seed for sub-stream `stream` of `seed` (splitmix64
// finalizer over the combined words).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace evonet

#endif  // EVONET_RNG_HPP
