#include "otsim/rng.hpp"

#include "otsim/bytes.hpp"
#include "otsim/errors.hpp"
#include "otsim/hash.hpp"

namespace otsim {

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

Rng Rng::fork(std::string_view label) const {
  Bytes material;
  put_u64be(material, seed_);
  material.insert(material.end(), label.begin(), label.end());
  Digest d = sha256(material);
  std::uint64_t child = 0;
  for (int i = 0; i < 8; ++i) child = (child << 8) | d[i];
  return Rng(child);
}

std::uint64_t Rng::next_u64() { return engine_(); }

int Rng::bit() { return static_cast<int>(engine_() >> 63); }

std::uint64_t Rng::index(std::uint64_t n) {
  if (n == 0) throw ValidationError("Rng::index needs n > 0");
  // Rejection sampling to avoid modulo bias.
  const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
  std::uint64_t v;
  do {
    v = engine_();
  } while (v >= limit);
  return v % n;
}

double Rng::real() {
  // 53 random bits -> [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

void Rng::fill(std::uint8_t* out, std::size_t n) {
  std::size_t i = 0;
  while (i < n) {
    std::uint64_t v = engine_();
    for (int k = 0; k < 8 && i < n; ++k, ++i) {
      out[i] = static_cast<std::uint8_t>(v >> 56);
      v <<= 8;
    }
  }
}

}  // namespace otsim
