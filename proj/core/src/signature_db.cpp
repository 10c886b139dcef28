#include <fstream>
#include <istream>
#include <ostream>

#include "flashguard/calldata.hpp"

namespace flashguard::calldata {

const char* to_string(SignatureClass c) {
  switch (c) {
    case SignatureClass::FlashLoan: return "flashLoan";
    case SignatureClass::Transfer: return "transfer";
    case SignatureClass::Approval: return "approval";
    case SignatureClass::Withdrawal: return "withdrawal";
  }
  return "?";
}

SignatureClass parse_class(std::string_view text) {
  for (auto c : kAllClasses)
    if (text == to_string(c)) return c;
  throw Error(ErrorCode::ParseError, "unknown signature class '" + std::string(text) + "'");
}

SignatureDatabase SignatureDatabase::builtin() {
  SignatureDatabase db;
  // The flash-loan signatures are provider specific and their argument lists are elided
  // upstream, so the selectors are stored verbatim rather than derived.
  db.add({SignatureClass::FlashLoan, selectors::flash_loan_a, "flashLoan(address,uint256,...)", "lender-a",
          "0x0d7d7...95f0"});
  db.add({SignatureClass::FlashLoan, selectors::flash_loan_b, "flashLoan(address,uint256,...)", "lender-b",
          "0xf4626...22ab"});
  db.add({SignatureClass::Transfer, compute_selector("transfer(address,uint256)"), "transfer(address,uint256)", "",
          "0xddf25...b3ef"});
  db.add({SignatureClass::Approval, compute_selector("approve(address,uint256)"), "approve(address,uint256)", "",
          "0x8c5be...b925"});
  db.add({SignatureClass::Withdrawal, compute_selector("withdraw(uint256)"), "withdraw(uint256)", "",
          "0xe1fff...39db"});
  return db;
}

void SignatureDatabase::add(const SignatureEntry& entry) {
  auto it = index_.find(entry.selector.value());
  if (it != index_.end()) {
    if (it->second != entry.cls)
      throw Error(ErrorCode::ClassOverlap, entry.selector.hex() + " already registered as " + to_string(it->second));
    return;
  }
  index_.emplace(entry.selector.value(), entry.cls);
  entries_.push_back(entry);
}

void SignatureDatabase::register_flash_loan_provider(Selector selector, std::string signature, std::string provider) {
  add({SignatureClass::FlashLoan, selector, std::move(signature), std::move(provider), ""});
}

std::set<Selector> SignatureDatabase::members(SignatureClass c) const {
  std::set<Selector> out;
  for (const auto& e : entries_)
    if (e.cls == c) out.insert(e.selector);
  return out;
}

std::optional<std::string> SignatureDatabase::provider(Selector s) const {
  for (const auto& e : entries_)
    if (e.selector == s && !e.provider.empty()) return e.provider;
  return std::nullopt;
}

SignatureDatabase SignatureDatabase::parse(std::istream& in) {
  SignatureDatabase db;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    // The signature itself contains commas, so split on the first two and the last one.
    auto c1 = line.find(',');
    auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    auto c3 = line.rfind(',');
    if (c1 == std::string::npos || c2 == std::string::npos || c3 <= c2)
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected class,selector,signature,provider");
    try {
      SignatureEntry e;
      e.cls = parse_class(line.substr(0, c1));
      std::string hex = line.substr(c1 + 1, c2 - c1 - 1);
      if (hex.rfind("0x", 0) == 0) hex.erase(0, 2);
      if (hex.size() != 8) throw std::invalid_argument("selector must have 8 hex chars");
      e.selector = Selector::from_hex(hex);
      e.signature = line.substr(c2 + 1, c3 - c2 - 1);
      e.provider = line.substr(c3 + 1);
      db.add(e);
    } catch (const Error& err) {
      throw Error(err.code(), "line " + std::to_string(lineno) + ": " + err.what());
    } catch (const std::exception& err) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + err.what());
    }
  }
  return db;
}

SignatureDatabase SignatureDatabase::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open signature database " + path);
  return parse(in);
}

void SignatureDatabase::write(std::ostream& out) const {
  for (const auto& e : entries_)
    out << to_string(e.cls) << ',' << to_hex(e.selector.bytes, false) << ',' << e.signature << ',' << e.provider
        << '\n';
}

}  // namespace flashguard::calldata
