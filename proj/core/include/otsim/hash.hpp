#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "otsim/bytes.hpp"

namespace otsim {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);
Digest sha256(std::string_view text);

// First 16 hex characters of the digest; used for transcript lines.
std::string short_digest(std::span<const std::uint8_t> data);

}  // namespace otsim
