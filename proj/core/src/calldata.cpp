#include "flashguard/calldata.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>

#include "flashguard/keccak.hpp"

namespace flashguard::calldata {

namespace {

// 0xfe keeps the tag above any realistic amount and out of the address range.
constexpr std::array<std::uint8_t, kTagMagicSize> kTagMagic = {
    0xfe, 'f', 'g', 'u', 'a', 'r', 'd', '.', 'n', 'e', 's', 't', 'e', 'd', '.', 'v', '1',
};

constexpr std::size_t kMaxNesting = 64;

bool valid_identifier_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$'; }

bool valid_type_char(char c) { return valid_identifier_char(c) || c == '[' || c == ']'; }

std::uint32_t read_be32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) << 24 | std::uint32_t(p[1]) << 16 | std::uint32_t(p[2]) << 8 | p[3];
}

void append_call(const CallData& call, Bytes& out) {
  out.insert(out.end(), call.selector.bytes.begin(), call.selector.bytes.end());
  for (const auto& w : call.args) {
    if (is_nested_tag(w)) throw Error(ErrorCode::LengthMismatch, "argument word collides with nested tag");
    out.insert(out.end(), w.begin(), w.end());
  }
  for (const auto& child : call.nested) {
    std::size_t body = encoded_size(child);
    if (body > 0xffffffffu) throw Error(ErrorCode::LengthMismatch, "nested blob too large");
    out.insert(out.end(), kTagMagic.begin(), kTagMagic.end());
    out.push_back(std::uint8_t(body >> 24));
    out.push_back(std::uint8_t(body >> 16));
    out.push_back(std::uint8_t(body >> 8));
    out.push_back(std::uint8_t(body));
    append_call(child, out);
  }
}

CallData decode_at(std::span<const std::uint8_t> in, std::size_t depth) {
  if (depth > kMaxNesting) throw Error(ErrorCode::LengthMismatch, "nesting too deep");
  if (in.size() < 4) throw Error(ErrorCode::TruncatedInput, "input shorter than a selector");
  CallData call;
  std::copy(in.begin(), in.begin() + 4, call.selector.bytes.begin());
  std::size_t pos = 4;
  while (pos < in.size()) {
    if (in.size() - pos < 32) throw Error(ErrorCode::TruncatedInput, "partial word at offset " + std::to_string(pos));
    auto w = in.subspan(pos, 32);
    if (!is_nested_tag(w)) {
      if (!call.nested.empty()) throw Error(ErrorCode::LengthMismatch, "argument word after nested blobs");
      Word arg;
      std::copy(w.begin(), w.end(), arg.begin());
      call.args.push_back(arg);
      pos += 32;
      continue;
    }
    std::size_t body = read_be32(w.data() + kTagMagicSize);
    pos += 32;
    if (body > in.size() - pos) throw Error(ErrorCode::TruncatedInput, "nested blob exceeds input");
    call.nested.push_back(decode_at(in.subspan(pos, body), depth + 1));
    pos += body;
  }
  return call;
}

void scan_at(std::span<const std::uint8_t> in, const SignatureDatabase& db, std::set<Selector>& out,
             std::size_t depth) {
  if (in.size() < 4 || depth > kMaxNesting) return;
  Selector head;
  std::memcpy(head.bytes.data(), in.data(), 4);
  if (db.contains(head)) out.insert(head);
  std::size_t pos = 4;
  while (in.size() - pos >= 32) {
    auto w = in.subspan(pos, 32);
    pos += 32;
    if (!is_nested_tag(w)) continue;
    std::size_t body = read_be32(w.data() + kTagMagicSize);
    if (body > in.size() - pos) return;
    scan_at(in.subspan(pos, body), db, out, depth + 1);
    pos += body;
  }
}

}  // namespace

Selector Selector::from_hex(std::string_view text) {
  Bytes raw = flashguard::from_hex(text);
  if (raw.size() != 4) throw std::invalid_argument("selector must be 4 bytes: '" + std::string(text) + "'");
  Selector s;
  std::copy(raw.begin(), raw.end(), s.bytes.begin());
  return s;
}

std::string Selector::hex() const { return to_hex(bytes); }

Selector compute_selector(std::string_view sig) {
  auto open = sig.find('(');
  if (open == std::string_view::npos || open == 0 || sig.back() != ')')
    throw Error(ErrorCode::MalformedSignature, std::string(sig));
  if (std::isdigit(static_cast<unsigned char>(sig[0])) ||
      !std::all_of(sig.begin(), sig.begin() + open, valid_identifier_char))
    throw Error(ErrorCode::MalformedSignature, "bad function name in '" + std::string(sig) + "'");
  // Parameter list: comma separated types, tuples allowed, no empty entries.
  std::string_view params = sig.substr(open + 1, sig.size() - open - 2);
  int parens = 0;
  bool expect_type = true;
  for (char c : params) {
    if (c == '(') {
      if (!expect_type) throw Error(ErrorCode::MalformedSignature, std::string(sig));
      ++parens;
    } else if (c == ')') {
      if (--parens < 0 || expect_type) throw Error(ErrorCode::MalformedSignature, std::string(sig));
    } else if (c == ',') {
      if (expect_type) throw Error(ErrorCode::MalformedSignature, std::string(sig));
      expect_type = true;
    } else if (valid_type_char(c)) {
      expect_type = false;
    } else {
      throw Error(ErrorCode::MalformedSignature, "unexpected character in '" + std::string(sig) + "'");
    }
  }
  if (parens != 0 || (expect_type && !params.empty())) throw Error(ErrorCode::MalformedSignature, std::string(sig));

  auto digest = keccak256(sig);
  Selector s;
  std::copy(digest.begin(), digest.begin() + 4, s.bytes.begin());
  return s;
}

bool is_nested_tag(std::span<const std::uint8_t> w) {
  return w.size() >= 32 && std::equal(kTagMagic.begin(), kTagMagic.end(), w.begin());
}

std::size_t encoded_size(const CallData& call) {
  std::size_t n = 4 + 32 * call.args.size();
  for (const auto& child : call.nested) n += 32 + encoded_size(child);
  return n;
}

Bytes encode_call(const CallData& call) {
  Bytes out;
  out.reserve(encoded_size(call));
  append_call(call, out);
  return out;
}

CallData decode_call(std::span<const std::uint8_t> input) { return decode_at(input, 0); }

Word word(const Address& a) { return a.to_word(); }
Word word(const Amount& v) { return amount_to_word(v); }
Word word(std::uint64_t v) { return amount_to_word(Amount(v)); }

std::set<Selector> scan_embedded_selectors(std::span<const std::uint8_t> input, const SignatureDatabase& db) {
  std::set<Selector> out;
  scan_at(input, db, out, 0);
  return out;
}

}  // namespace flashguard::calldata
