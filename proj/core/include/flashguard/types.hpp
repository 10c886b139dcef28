#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace flashguard {

using Bytes = std::vector<std::uint8_t>;
using Word = std::array<std::uint8_t, 32>;
using Gas = std::uint64_t;

// Token and native amounts in base units. Checked: overflow and underflow throw.
using Amount = boost::multiprecision::checked_uint256_t;

enum class ErrorCode {
  MalformedSignature,
  TruncatedInput,
  LengthMismatch,
  UnknownRecipient,
  BadNonce,
  InvalidTransaction,
  DuplicateHash,
  ClassOverlap,
  InfeasibleShape,
  AmbiguousTarget,
  InsufficientGuardianFunds,
  RelayUnavailable,
  ConfigError,
  ParseError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct Hash32 {
  std::array<std::uint8_t, 32> bytes{};

  std::string hex() const;
  static Hash32 from_hex(std::string_view text);
  auto operator<=>(const Hash32&) const = default;
};

std::string to_hex(std::span<const std::uint8_t> data, bool prefix = true);
Bytes from_hex(std::string_view text);

Word amount_to_word(const Amount& value);
Amount word_to_amount(const Word& word);
Amount parse_amount(std::string_view decimal);
std::string amount_to_string(const Amount& value);

}  // namespace flashguard

template <>
struct std::hash<flashguard::Hash32> {
  std::size_t operator()(const flashguard::Hash32& h) const noexcept {
    std::size_t out = 0;
    for (int i = 0; i < 8; ++i) out = (out << 8) | h.bytes[i];
    return out;
  }
};
