#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace otsim {

// Deterministic RNG for reproducible runs.  All randomness in the library
// flows through this class; forking with a label gives independent,
// reproducible substreams (child seed is derived by hashing seed || label).
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  Rng fork(std::string_view label) const;

  std::uint64_t next_u64();
  int bit();
  // Uniform integer in [0, n); n must be positive.
  std::uint64_t index(std::uint64_t n);
  // Uniform double in [0, 1).
  double real();
  void fill(std::uint8_t* out, std::size_t n);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace otsim
