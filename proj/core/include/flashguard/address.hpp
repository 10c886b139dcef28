#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>

#include "flashguard/types.hpp"

namespace flashguard {

enum class AccountKind : std::uint8_t { EOA, Contract };

// 20-byte account identifier. The kind tag is informational; identity is the bytes.
struct Address {
  std::array<std::uint8_t, 20> bytes{};
  AccountKind kind = AccountKind::EOA;

  std::string hex() const;
  static Address from_hex(std::string_view text, AccountKind kind = AccountKind::EOA);
  // Deterministic address derived from a label, for scenario construction.
  static Address from_label(std::string_view label, AccountKind kind = AccountKind::EOA);

  static Address zero();
  static Address burn();

  bool is_zero() const;
  Word to_word() const;
  // Interprets a word as an address if its top 12 bytes are zero.
  static bool from_word(const Word& word, Address& out);

  bool operator==(const Address& other) const { return bytes == other.bytes; }
  auto operator<=>(const Address& other) const { return bytes <=> other.bytes; }
};

}  // namespace flashguard

template <>
struct std::hash<flashguard::Address> {
  std::size_t operator()(const flashguard::Address& a) const noexcept {
    std::size_t out = 0;
    for (int i = 12; i < 20; ++i) out = (out << 8) | a.bytes[i];
    return out;
  }
};
