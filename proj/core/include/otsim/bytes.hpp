#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "otsim/errors.hpp"

namespace otsim {

using Bytes = std::vector<std::uint8_t>;

inline void put_u32be(Bytes& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_u64be(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8)
    out.push_back(static_cast<std::uint8_t>(v >> shift));
}

inline std::uint32_t get_u32be(std::span<const std::uint8_t> in, std::size_t at) {
  if (at + 4 > in.size()) throw IntegrityError("buffer too short for u32");
  return (std::uint32_t{in[at]} << 24) | (std::uint32_t{in[at + 1]} << 16) |
         (std::uint32_t{in[at + 2]} << 8) | std::uint32_t{in[at + 3]};
}

inline std::uint64_t get_u64be(std::span<const std::uint8_t> in, std::size_t at) {
  if (at + 8 > in.size()) throw IntegrityError("buffer too short for u64");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | in[at + i];
  return v;
}

std::string hex(std::span<const std::uint8_t> data);
Bytes from_hex(std::string_view text);  // throws ValidationError on odd/non-hex

}  // namespace otsim
