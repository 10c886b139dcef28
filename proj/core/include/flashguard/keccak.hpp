#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

namespace flashguard {

// Original Keccak-256 (pre-FIPS padding 0x01), as used for EVM selectors.
std::array<std::uint8_t, 32> keccak256(std::span<const std::uint8_t> data);
std::array<std::uint8_t, 32> keccak256(std::string_view text);

}  // namespace flashguard
