#pragma once

#include <cstdint>
#include <random>

namespace sandwich {

// Seeded random stream whose doubles are identical on every platform:
// mt19937_64 is pinned by the standard, and the bit-to-double mappings below
// avoid the library-defined distributions on purpose.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform draw in the open interval (0, 1)
  double uniform();

  // standard normal via the inverse CDF (exact same values everywhere)
  double normal();

 private:
  std::mt19937_64 gen_;
};

}  // namespace sandwich
