#pragma once

#include <cstdint>
#include <random>

namespace tlc {

/// Seeded generator used for every random draw in the project.
///
/// Bits come from std::mt19937_64 (a fully specified algorithm). The
/// derived distributions are defined here rather than taken from <random>,
/// whose distributions are implementation-defined, so that sample sets can
/// be reproduced exactly from the seed in any language:
///   uniform()    = (next() >> 11) * 2^-53            in [0, 1)
///   normal()     = Box-Muller on u1 = 1 - uniform(), u2 = uniform();
///                  returns sqrt(-2 ln u1) cos(2 pi u2) then, on the next
///                  call, sqrt(-2 ln u1) sin(2 pi u2)
///   below(n)     = next() mod n, rejecting draws >= 2^64 - (2^64 mod n)
///   fork(stream) = Rng(splitmix64(seed + stream)) for independent sub-streams
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next() { return engine_(); }

  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::uint64_t below(std::uint64_t n);

  Rng fork(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace tlc
