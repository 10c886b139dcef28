#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "flashguard/address.hpp"
#include "flashguard/types.hpp"

namespace flashguard::calldata {

struct Selector {
  std::array<std::uint8_t, 4> bytes{};

  constexpr std::uint32_t value() const {
    return std::uint32_t(bytes[0]) << 24 | std::uint32_t(bytes[1]) << 16 | std::uint32_t(bytes[2]) << 8 | bytes[3];
  }
  static constexpr Selector from_u32(std::uint32_t v) {
    return Selector{{std::uint8_t(v >> 24), std::uint8_t(v >> 16), std::uint8_t(v >> 8), std::uint8_t(v)}};
  }
  static Selector from_hex(std::string_view text);
  std::string hex() const;

  auto operator<=>(const Selector&) const = default;
};

// Validates `name(type,...)` and hashes it.
Selector compute_selector(std::string_view signature);

struct CallData {
  Selector selector;
  std::vector<Word> args;
  std::vector<CallData> nested;

  bool operator==(const CallData&) const = default;
};

// Wire layout: selector | args (32 bytes each) | nested blobs. Each nested blob is a
// 32-byte tag word (magic prefix + 4-byte big-endian body length) followed by the body.
inline constexpr std::size_t kTagMagicSize = 28;
bool is_nested_tag(std::span<const std::uint8_t> word);
std::size_t encoded_size(const CallData& call);

Bytes encode_call(const CallData& call);
CallData decode_call(std::span<const std::uint8_t> input);

Word word(const Address& a);
Word word(const Amount& v);
Word word(std::uint64_t v);

enum class SignatureClass : std::uint8_t { FlashLoan, Transfer, Approval, Withdrawal };
inline constexpr std::array<SignatureClass, 4> kAllClasses = {
    SignatureClass::FlashLoan, SignatureClass::Transfer, SignatureClass::Approval, SignatureClass::Withdrawal};

const char* to_string(SignatureClass c);
SignatureClass parse_class(std::string_view text);

struct SignatureEntry {
  SignatureClass cls;
  Selector selector;
  std::string signature;
  std::string provider;
  std::string event_topic;  // metadata only; detection keys on function selectors
};

namespace selectors {
inline constexpr Selector transfer = Selector::from_u32(0xa9059cbb);
inline constexpr Selector approve = Selector::from_u32(0x095ea7b3);
inline constexpr Selector withdraw = Selector::from_u32(0x2e1a7d4d);
inline constexpr Selector transfer_from = Selector::from_u32(0x23b872dd);
inline constexpr Selector balance_of = Selector::from_u32(0x70a08231);
inline constexpr Selector allowance = Selector::from_u32(0xdd62ed3e);
inline constexpr Selector flash_loan_a = Selector::from_u32(0x1b8b5af1);
inline constexpr Selector flash_loan_b = Selector::from_u32(0xc2b12a73);
inline constexpr Selector on_flash_loan = Selector::from_u32(0x6d2b653f);
inline constexpr Selector execute = Selector::from_u32(0xfe0d94c1);
}  // namespace selectors

// Selector classes used by the detector. Classes are pairwise disjoint.
class SignatureDatabase {
 public:
  // Built-in table: two provider-specific flash-loan selectors, transfer, approve, withdraw.
  static SignatureDatabase builtin();
  static SignatureDatabase parse(std::istream& in);
  static SignatureDatabase load(const std::string& path);
  void write(std::ostream& out) const;

  void add(const SignatureEntry& entry);
  void register_flash_loan_provider(Selector selector, std::string signature, std::string provider);

  std::optional<SignatureClass> classify(Selector s) const {
    auto it = index_.find(s.value());
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(Selector s) const { return index_.count(s.value()) != 0; }
  std::set<Selector> members(SignatureClass c) const;
  std::optional<std::string> provider(Selector s) const;
  const std::vector<SignatureEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<SignatureEntry> entries_;
  std::unordered_map<std::uint32_t, SignatureClass> index_;
};

// Known selectors at the head of the input or at the head of any nested blob.
std::set<Selector> scan_embedded_selectors(std::span<const std::uint8_t> input, const SignatureDatabase& db);

}  // namespace flashguard::calldata
