#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "flashguard/address.hpp"
#include "flashguard/calldata.hpp"
#include "flashguard/types.hpp"

namespace flashguard::chainsim {

using calldata::Selector;

// Address-valued expression evaluated in a call frame.
struct AddrExpr {
  enum class Kind : std::uint8_t { Literal, Self, Caller, Origin, Arg };
  Kind kind = Kind::Literal;
  Address literal{};
  std::size_t arg = 0;

  static AddrExpr lit(const Address& a) { return {Kind::Literal, a, 0}; }
  static AddrExpr self() { return {Kind::Self, {}, 0}; }
  static AddrExpr caller() { return {Kind::Caller, {}, 0}; }
  static AddrExpr origin() { return {Kind::Origin, {}, 0}; }
  static AddrExpr arg_at(std::size_t i) { return {Kind::Arg, {}, i}; }

  bool operator==(const AddrExpr&) const = default;
};

// Integer-valued expression. Storage reads may be keyed by a sub-expression.
struct ValueExpr {
  enum class Kind : std::uint8_t { Const, Arg, Balance, Allowance, Storage, Add, Sub, AddressOf };
  Kind kind = Kind::Const;
  Amount constant{};
  std::size_t arg = 0;
  AddrExpr token{};
  AddrExpr a{};
  AddrExpr b{};
  std::string slot;
  std::vector<ValueExpr> operands;

  static ValueExpr constant_of(const Amount& v);
  static ValueExpr arg_at(std::size_t i);
  static ValueExpr balance(const AddrExpr& token, const AddrExpr& holder);
  static ValueExpr allowance(const AddrExpr& token, const AddrExpr& owner, const AddrExpr& spender);
  static ValueExpr storage(std::string slot);
  static ValueExpr storage_at(std::string slot, ValueExpr key);
  static ValueExpr add(ValueExpr x, ValueExpr y);
  static ValueExpr sub(ValueExpr x, ValueExpr y);
  static ValueExpr address_of(const AddrExpr& a);

  bool operator==(const ValueExpr&) const = default;
};

enum class CmpOp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

struct Condition {
  ValueExpr lhs;
  CmpOp op = CmpOp::Eq;
  ValueExpr rhs;

  bool operator==(const Condition&) const = default;
};

struct CallEffect {
  AddrExpr target;
  Selector selector;
  std::vector<ValueExpr> args;
  bool check_return = true;  // revert when a lenient token reports failure

  bool operator==(const CallEffect&) const = default;
};

// Invokes nested blob i of the current call on the address held in arg (offset + i).
struct ForwardEffect {
  std::size_t target_arg_offset = 0;

  bool operator==(const ForwardEffect&) const = default;
};

struct StoreEffect {
  std::string slot;
  std::optional<ValueExpr> key;
  ValueExpr value;

  bool operator==(const StoreEffect&) const = default;
};

struct MintEffect {
  AddrExpr token;
  AddrExpr account;
  ValueExpr amount;

  bool operator==(const MintEffect&) const = default;
};

struct BurnEffect {
  AddrExpr token;
  AddrExpr account;
  ValueExpr amount;

  bool operator==(const BurnEffect&) const = default;
};

struct RevertEffect {
  std::string reason;

  bool operator==(const RevertEffect&) const = default;
};

using Effect = std::variant<CallEffect, ForwardEffect, StoreEffect, MintEffect, BurnEffect, RevertEffect>;

// A guarded step: skipped unless `when` holds, reverts unless every `require` holds.
struct Step {
  std::string name;
  std::optional<Condition> when;
  std::vector<Condition> require;
  std::vector<Effect> effects;
  Gas gas_cost = 0;

  bool operator==(const Step&) const = default;
};

struct ContractProgram {
  std::string name;
  std::map<Selector, std::vector<Step>> handlers;

  bool operator==(const ContractProgram&) const = default;
};

std::string storage_key(const std::string& slot, const std::optional<Amount>& key);

// Shorthand constructors used by scenario builders.
Condition cmp(ValueExpr lhs, CmpOp op, ValueExpr rhs);
CallEffect call(AddrExpr target, Selector selector, std::vector<ValueExpr> args, bool check_return = true);
StoreEffect store(std::string slot, ValueExpr value);
StoreEffect store_at(std::string slot, ValueExpr key, ValueExpr value);

}  // namespace flashguard::chainsim
