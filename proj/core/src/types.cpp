#include "flashguard/types.hpp"

#include <algorithm>

#include "flashguard/address.hpp"
#include "flashguard/keccak.hpp"

namespace flashguard {

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string_view strip_prefix(std::string_view text) {
  if (text.size() >= 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) text.remove_prefix(2);
  return text;
}

}  // namespace

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedSignature: return "MalformedSignature";
    case ErrorCode::TruncatedInput: return "TruncatedInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnknownRecipient: return "UnknownRecipient";
    case ErrorCode::BadNonce: return "BadNonce";
    case ErrorCode::InvalidTransaction: return "InvalidTransaction";
    case ErrorCode::DuplicateHash: return "DuplicateHash";
    case ErrorCode::ClassOverlap: return "ClassOverlap";
    case ErrorCode::InfeasibleShape: return "InfeasibleShape";
    case ErrorCode::AmbiguousTarget: return "AmbiguousTarget";
    case ErrorCode::InsufficientGuardianFunds: return "InsufficientGuardianFunds";
    case ErrorCode::RelayUnavailable: return "RelayUnavailable";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

std::string to_hex(std::span<const std::uint8_t> data, bool prefix) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2 + 2);
  if (prefix) out += "0x";
  for (auto b : data) {
    out += digits[b >> 4];
    out += digits[b & 0xf];
  }
  return out;
}

Bytes from_hex(std::string_view text) {
  text = strip_prefix(text);
  if (text.size() % 2 != 0) throw std::invalid_argument("odd-length hex string");
  Bytes out(text.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_value(text[2 * i]);
    int lo = hex_value(text[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex digit");
    out[i] = static_cast<std::uint8_t>(hi << 4 | lo);
  }
  return out;
}

std::string Hash32::hex() const { return to_hex(bytes); }

Hash32 Hash32::from_hex(std::string_view text) {
  Bytes raw = flashguard::from_hex(text);
  if (raw.size() != 32) throw std::invalid_argument("hash must be 32 bytes");
  Hash32 h;
  std::copy(raw.begin(), raw.end(), h.bytes.begin());
  return h;
}

Word amount_to_word(const Amount& value) {
  Word w{};
  std::vector<std::uint8_t> raw;
  boost::multiprecision::export_bits(value, std::back_inserter(raw), 8);
  std::copy(raw.begin(), raw.end(), w.begin() + (32 - raw.size()));
  return w;
}

Amount word_to_amount(const Word& word) {
  Amount out;
  boost::multiprecision::import_bits(out, word.begin(), word.end(), 8);
  return out;
}

Amount parse_amount(std::string_view decimal) {
  if (decimal.empty() || decimal.size() > 78 ||
      !std::all_of(decimal.begin(), decimal.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    throw std::invalid_argument("amount must be a decimal string: '" + std::string(decimal) + "'");
  }
  try {
    return Amount(std::string(decimal));
  } catch (const std::exception&) {
    throw std::invalid_argument("amount out of range: '" + std::string(decimal) + "'");
  }
}

std::string amount_to_string(const Amount& value) { return value.str(); }

std::string Address::hex() const { return to_hex(bytes); }

Address Address::from_hex(std::string_view text, AccountKind kind) {
  Bytes raw = flashguard::from_hex(text);
  if (raw.size() != 20) throw std::invalid_argument("address must be 20 bytes: '" + std::string(text) + "'");
  Address a;
  std::copy(raw.begin(), raw.end(), a.bytes.begin());
  a.kind = kind;
  return a;
}

Address Address::from_label(std::string_view label, AccountKind kind) {
  auto digest = keccak256(label);
  Address a;
  std::copy(digest.begin() + 12, digest.end(), a.bytes.begin());
  a.kind = kind;
  return a;
}

Address Address::zero() { return Address{}; }

Address Address::burn() {
  Address a;
  a.bytes[18] = 0xde;
  a.bytes[19] = 0xad;
  return a;
}

bool Address::is_zero() const {
  return std::all_of(bytes.begin(), bytes.end(), [](std::uint8_t b) { return b == 0; });
}

Word Address::to_word() const {
  Word w{};
  std::copy(bytes.begin(), bytes.end(), w.begin() + 12);
  return w;
}

bool Address::from_word(const Word& word, Address& out) {
  if (!std::all_of(word.begin(), word.begin() + 12, [](std::uint8_t b) { return b == 0; })) return false;
  std::copy(word.begin() + 12, word.end(), out.bytes.begin());
  return true;
}

}  // namespace flashguard
