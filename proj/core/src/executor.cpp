#include <limits>
#include <map>
#include <tuple>

#include "flashguard/chainsim/execution.hpp"
#include "flashguard/keccak.hpp"

namespace flashguard::chainsim {

namespace {

using calldata::CallData;
namespace sel = calldata::selectors;

constexpr std::uint32_t kMaxDepth = 256;

struct RevertSignal {
  std::string reason;
};
struct OutOfGasSignal {};

// Copy-on-write view over a base world. Writes stay local until commit.
class Overlay {
 public:
  explicit Overlay(const WorldState& base) : base_(base) {}

  Amount balance(const Address& token, const Address& holder) const {
    auto it = balances_.find({token, holder});
    return it != balances_.end() ? it->second : base_.balance_of(token, holder);
  }
  void set_balance(const Address& token, const Address& holder, const Amount& v) { balances_[{token, holder}] = v; }

  Amount allowance(const Address& token, const Address& owner, const Address& spender) const {
    auto it = allowances_.find({token, owner, spender});
    if (it != allowances_.end()) return it->second;
    auto t = base_.tokens.find(token);
    return t == base_.tokens.end() ? Amount(0) : t->second.allowance(owner, spender);
  }
  void set_allowance(const Address& token, const Address& owner, const Address& spender, const Amount& v) {
    allowances_[{token, owner, spender}] = v;
  }

  Amount supply(const Address& token) const {
    auto it = supply_.find(token);
    if (it != supply_.end()) return it->second;
    auto t = base_.tokens.find(token);
    return t == base_.tokens.end() ? Amount(0) : t->second.total_supply;
  }
  void set_supply(const Address& token, const Amount& v) { supply_[token] = v; }

  Amount storage(const Address& contract, const std::string& key) const {
    auto it = storage_.find({contract, key});
    if (it != storage_.end()) return it->second;
    auto c = base_.contracts.find(contract);
    if (c == base_.contracts.end()) return 0;
    auto s = c->second.storage.find(key);
    return s == c->second.storage.end() ? Amount(0) : s->second;
  }
  void set_storage(const Address& contract, const std::string& key, const Amount& v) { storage_[{contract, key}] = v; }

  Amount native(const Address& a) const {
    auto it = native_.find(a);
    return it != native_.end() ? it->second : base_.native_of(a);
  }
  void set_native(const Address& a, const Amount& v) { native_[a] = v; }

  void commit(WorldState& w) const {
    for (const auto& [key, v] : balances_) {
      auto& t = w.tokens.at(key.first);
      if (v == 0)
        t.balances.erase(key.second);
      else
        t.balances[key.second] = v;
    }
    for (const auto& [key, v] : allowances_) {
      auto& t = w.tokens.at(std::get<0>(key));
      std::pair<Address, Address> k{std::get<1>(key), std::get<2>(key)};
      if (v == 0)
        t.allowances.erase(k);
      else
        t.allowances[k] = v;
    }
    for (const auto& [token, v] : supply_) w.tokens.at(token).total_supply = v;
    for (const auto& [key, v] : storage_) {
      auto& s = w.contracts.at(key.first).storage;
      if (v == 0)
        s.erase(key.second);
      else
        s[key.second] = v;
    }
    for (const auto& [a, v] : native_) w.accounts[a].native = v;
  }

 private:
  const WorldState& base_;
  std::map<std::pair<Address, Address>, Amount> balances_;
  std::map<std::tuple<Address, Address, Address>, Amount> allowances_;
  std::map<Address, Amount> supply_;
  std::map<std::pair<Address, std::string>, Amount> storage_;
  std::map<Address, Amount> native_;
};

struct Outcome {
  bool ok = true;
  Amount value{};
};

struct Frame {
  Address self;
  Address caller;
  const CallData* cd;
  std::uint32_t depth;
};

class Executor {
 public:
  Executor(const WorldState& world, const GasSchedule& gas, Gas limit, const Address& origin,
           const ExecOptions& options, ExecutionTrace& trace)
      : world_(world), state_(world), gas_(gas), limit_(limit), origin_(origin), options_(options), trace_(trace) {}

  Overlay& state() { return state_; }
  Gas gas_used() const { return used_; }
  std::size_t points() const { return points_; }

  void charge(Gas g) {
    if (g > limit_ - used_) {
      used_ = limit_;
      throw OutOfGasSignal{};
    }
    used_ += g;
  }

  void point() {
    std::size_t index = points_++;
    if (options_.inject && options_.inject->point == index) {
      if (options_.inject->kind == FailureInjection::Kind::GuardFailure) throw RevertSignal{"injected guard failure"};
      used_ = limit_;
      throw OutOfGasSignal{};
    }
  }

  void move_native(const Address& from, const Address& to, const Amount& amount) {
    Amount have = state_.native(from);
    if (have < amount) throw RevertSignal{"insufficient native balance"};
    state_.set_native(from, have - amount);
    state_.set_native(to, state_.native(to) + amount);
  }

  Outcome call(const Address& caller, const Address& callee, const CallData& cd, std::uint32_t depth) {
    if (depth > kMaxDepth) throw RevertSignal{"call depth exceeded"};
    if (depth > 0) charge(gas_.call);
    trace_.internal_calls.push_back({caller, callee, cd.selector, cd.args, depth});

    if (auto t = world_.tokens.find(callee); t != world_.tokens.end()) return token_call(t->second, caller, cd);
    if (auto p = world_.providers.find(callee); p != world_.providers.end()) {
      if (cd.selector != p->second.loan_selector) throw RevertSignal{"unsupported provider call"};
      return flash_loan(p->second, caller, cd, depth);
    }
    if (auto c = world_.contracts.find(callee); c != world_.contracts.end())
      return run_handler(*c->second.program, Frame{callee, caller, &cd, depth});
    return {};
  }

 private:
  static const Word& arg(const CallData& cd, std::size_t i) {
    if (i >= cd.args.size()) throw RevertSignal{"missing call argument " + std::to_string(i)};
    return cd.args[i];
  }

  static Address address_arg(const CallData& cd, std::size_t i) {
    Address a;
    if (!Address::from_word(arg(cd, i), a)) throw RevertSignal{"argument " + std::to_string(i) + " is not an address"};
    return a;
  }

  Outcome fail(const TokenLedger& t, const std::string& reason) {
    if (t.returns_false_on_failure) return {false, 0};
    throw RevertSignal{reason};
  }

  void move_tokens(const Address& token, const Address& from, const Address& to, const Amount& amount) {
    Amount from_bal = state_.balance(token, from);
    state_.set_balance(token, from, from_bal - amount);
    state_.set_balance(token, to, state_.balance(token, to) + amount);
    trace_.money_flows.push_back({token, from, to, amount});
  }

  Outcome token_call(const TokenLedger& t, const Address& caller, const CallData& cd) {
    const Address& token = t.token_id;
    point();
    if (cd.selector == sel::transfer) {
      charge(gas_.token_transfer);
      Address to = address_arg(cd, 0);
      Amount amount = word_to_amount(arg(cd, 1));
      if (state_.balance(token, caller) < amount) return fail(t, "InsufficientBalance");
      move_tokens(token, caller, to, amount);
      return {true, 1};
    }
    if (cd.selector == sel::approve) {
      charge(gas_.token_approve);
      state_.set_allowance(token, caller, address_arg(cd, 0), word_to_amount(arg(cd, 1)));
      return {true, 1};
    }
    if (cd.selector == sel::transfer_from) {
      charge(gas_.token_transfer);
      Address from = address_arg(cd, 0);
      Address to = address_arg(cd, 1);
      Amount amount = word_to_amount(arg(cd, 2));
      Amount allowed = state_.allowance(token, from, caller);
      if (allowed < amount) return fail(t, "InsufficientAllowance");
      if (state_.balance(token, from) < amount) return fail(t, "InsufficientBalance");
      state_.set_allowance(token, from, caller, allowed - amount);
      move_tokens(token, from, to, amount);
      return {true, 1};
    }
    if (cd.selector == sel::withdraw) {
      // The token contract's own holdings act as the vault.
      charge(gas_.token_transfer);
      Amount amount = word_to_amount(arg(cd, 0));
      if (state_.balance(token, token) < amount) return fail(t, "InsufficientBalance");
      move_tokens(token, token, caller, amount);
      return {true, 1};
    }
    if (cd.selector == sel::balance_of) {
      charge(gas_.token_view);
      return {true, state_.balance(token, address_arg(cd, 0))};
    }
    if (cd.selector == sel::allowance) {
      charge(gas_.token_view);
      return {true, state_.allowance(token, address_arg(cd, 0), address_arg(cd, 1))};
    }
    throw RevertSignal{"unsupported token call " + cd.selector.hex()};
  }

  Outcome flash_loan(const FlashLoanProvider& p, const Address& caller, const CallData& cd, std::uint32_t depth) {
    (void)caller;
    point();
    charge(gas_.flash_loan);
    Address receiver = address_arg(cd, 0);
    Address token = address_arg(cd, 1);
    Amount amount = word_to_amount(arg(cd, 2));
    if (amount == 0) return {};
    if (!world_.is_token(token)) throw RevertSignal{"flash loan of unknown token"};
    Amount before = state_.balance(token, p.address);
    if (before < amount) throw RevertSignal{"InsufficientLiquidity"};
    Amount fee = p.fee_for(amount);

    CallData lend{sel::transfer, {receiver.to_word(), amount_to_word(amount)}, {}};
    if (!call(p.address, token, lend, depth + 1).ok) throw RevertSignal{"flash loan transfer failed"};

    CallData callback{p.callback_selector, {token.to_word(), amount_to_word(amount), amount_to_word(fee)}, cd.nested};
    for (std::size_t i = 3; i < cd.args.size(); ++i) callback.args.push_back(cd.args[i]);
    call(p.address, receiver, callback, depth + 1);

    point();
    if (state_.balance(token, p.address) < before + fee) throw RevertSignal{"flash loan not repaid"};
    return {};
  }

  Outcome run_handler(const ContractProgram& program, const Frame& f) {
    auto h = program.handlers.find(f.cd->selector);
    if (h == program.handlers.end()) throw RevertSignal{"no handler " + f.cd->selector.hex() + " on " + program.name};
    for (const auto& step : h->second) {
      point();
      if (step.when && !test(*step.when, f)) continue;
      for (const auto& cond : step.require)
        if (!test(cond, f)) throw RevertSignal{program.name + "." + step.name + ": guard failed"};
      charge(step.gas_cost);
      for (const auto& effect : step.effects) std::visit([&](const auto& e) { apply(e, f); }, effect);
    }
    return {};
  }

  Address eval(const AddrExpr& e, const Frame& f) {
    switch (e.kind) {
      case AddrExpr::Kind::Literal: return e.literal;
      case AddrExpr::Kind::Self: return f.self;
      case AddrExpr::Kind::Caller: return f.caller;
      case AddrExpr::Kind::Origin: return origin_;
      case AddrExpr::Kind::Arg: return address_arg(*f.cd, e.arg);
    }
    throw RevertSignal{"bad address expression"};
  }

  Amount eval(const ValueExpr& e, const Frame& f) {
    using K = ValueExpr::Kind;
    switch (e.kind) {
      case K::Const: return e.constant;
      case K::Arg: return word_to_amount(arg(*f.cd, e.arg));
      case K::Balance: return state_.balance(eval(e.token, f), eval(e.a, f));
      case K::Allowance: return state_.allowance(eval(e.token, f), eval(e.a, f), eval(e.b, f));
      case K::Storage: return state_.storage(f.self, key_of(e.slot, e.operands.empty() ? nullptr : &e.operands[0], f));
      case K::Add: return eval(e.operands.at(0), f) + eval(e.operands.at(1), f);
      case K::Sub: {
        Amount x = eval(e.operands.at(0), f);
        Amount y = eval(e.operands.at(1), f);
        if (y > x) throw RevertSignal{"arithmetic underflow"};
        return x - y;
      }
      case K::AddressOf: return word_to_amount(eval(e.a, f).to_word());
    }
    throw RevertSignal{"bad value expression"};
  }

  std::string key_of(const std::string& slot, const ValueExpr* key, const Frame& f) {
    if (!key) return slot;
    return storage_key(slot, eval(*key, f));
  }

  bool test(const Condition& c, const Frame& f) {
    Amount l = eval(c.lhs, f);
    Amount r = eval(c.rhs, f);
    switch (c.op) {
      case CmpOp::Eq: return l == r;
      case CmpOp::Ne: return l != r;
      case CmpOp::Lt: return l < r;
      case CmpOp::Le: return l <= r;
      case CmpOp::Gt: return l > r;
      case CmpOp::Ge: return l >= r;
    }
    return false;
  }

  void apply(const CallEffect& e, const Frame& f) {
    CallData cd{e.selector, {}, {}};
    cd.args.reserve(e.args.size());
    for (const auto& a : e.args) cd.args.push_back(amount_to_word(eval(a, f)));
    Outcome out = call(f.self, eval(e.target, f), cd, f.depth + 1);
    if (!out.ok && e.check_return) throw RevertSignal{"call returned false"};
  }

  void apply(const ForwardEffect& e, const Frame& f) {
    for (std::size_t i = 0; i < f.cd->nested.size(); ++i) {
      Address target = address_arg(*f.cd, e.target_arg_offset + i);
      if (!call(f.self, target, f.cd->nested[i], f.depth + 1).ok) throw RevertSignal{"forwarded call returned false"};
    }
  }

  void apply(const StoreEffect& e, const Frame& f) {
    std::string key = e.key ? storage_key(e.slot, eval(*e.key, f)) : e.slot;
    state_.set_storage(f.self, key, eval(e.value, f));
  }

  void apply(const MintEffect& e, const Frame& f) {
    Address token = eval(e.token, f);
    if (!world_.is_token(token)) throw RevertSignal{"mint on unknown token"};
    Address to = eval(e.account, f);
    Amount amount = eval(e.amount, f);
    state_.set_balance(token, to, state_.balance(token, to) + amount);
    state_.set_supply(token, state_.supply(token) + amount);
  }

  void apply(const BurnEffect& e, const Frame& f) {
    Address token = eval(e.token, f);
    if (!world_.is_token(token)) throw RevertSignal{"burn on unknown token"};
    Address from = eval(e.account, f);
    Amount amount = eval(e.amount, f);
    Amount bal = state_.balance(token, from);
    if (bal < amount) throw RevertSignal{"InsufficientBalance"};
    state_.set_balance(token, from, bal - amount);
    state_.set_supply(token, state_.supply(token) - amount);
  }

  void apply(const RevertEffect& e, const Frame&) { throw RevertSignal{e.reason}; }

  const WorldState& world_;
  Overlay state_;
  const GasSchedule& gas_;
  Gas limit_;
  Gas used_ = 0;
  Address origin_;
  const ExecOptions& options_;
  ExecutionTrace& trace_;
  std::size_t points_ = 0;
};

void validate(const WorldState& world, const Transaction& tx, const ExecOptions& options) {
  if (!world.exists(tx.to)) throw Error(ErrorCode::UnknownRecipient, tx.to.hex());
  if (tx.gas_limit == 0) throw Error(ErrorCode::InvalidTransaction, "gas_limit must be positive");
  if (options.check_nonce && world.nonce_of(tx.from) != tx.nonce)
    throw Error(ErrorCode::BadNonce, "sender " + tx.from.hex() + " expects nonce " +
                                         std::to_string(world.nonce_of(tx.from)) + ", got " + std::to_string(tx.nonce));
}

// Runs tx over an overlay on `world`; commits into `commit_to` only on success.
ExecutionTrace execute(const WorldState& world, const Transaction& tx, const GasSchedule& gas,
                       const ExecOptions& options, WorldState* commit_to) {
  validate(world, tx, options);
  ExecutionTrace trace;
  trace.tx_hash = tx.hash;
  Executor ex(world, gas, tx.gas_limit, tx.from, options, trace);
  try {
    ex.charge(gas.intrinsic);
    if (tx.value > 0) ex.move_native(tx.from, tx.to, tx.value);
    if (!tx.input.empty() && world.is_contract(tx.to)) {
      CallData cd;
      try {
        cd = calldata::decode_call(tx.input);
      } catch (const Error& e) {
        throw RevertSignal{std::string("undecodable input: ") + e.what()};
      }
      ex.call(tx.from, tx.to, cd, 0);
    }
    trace.status = TxStatus::Success;
  } catch (const RevertSignal& r) {
    trace.status = TxStatus::Reverted;
    trace.revert_reason = r.reason;
  } catch (const OutOfGasSignal&) {
    trace.status = TxStatus::OutOfGas;
    trace.revert_reason = "out of gas";
  } catch (const std::overflow_error& e) {
    trace.status = TxStatus::Reverted;
    trace.revert_reason = std::string("arithmetic overflow: ") + e.what();
  } catch (const std::range_error& e) {
    trace.status = TxStatus::Reverted;
    trace.revert_reason = std::string("arithmetic error: ") + e.what();
  }
  trace.gas_used = ex.gas_used();
  trace.failure_points = ex.points();
  if (trace.status == TxStatus::Success && commit_to) ex.state().commit(*commit_to);
  return trace;
}

}  // namespace

const char* to_string(TxStatus s) {
  switch (s) {
    case TxStatus::Success: return "Success";
    case TxStatus::Reverted: return "Reverted";
    case TxStatus::OutOfGas: return "OutOfGas";
  }
  return "?";
}

Hash32 transaction_hash(const Address& from, std::uint64_t nonce) {
  Bytes buf(from.bytes.begin(), from.bytes.end());
  for (int i = 7; i >= 0; --i) buf.push_back(static_cast<std::uint8_t>(nonce >> (8 * i)));
  Hash32 h;
  h.bytes = keccak256(buf);
  return h;
}

Transaction make_transaction(const Address& from, std::uint64_t nonce, const Address& to, std::uint64_t gas_price,
                             Gas gas_limit, Bytes input, const Amount& value) {
  Transaction tx;
  tx.hash = transaction_hash(from, nonce);
  tx.nonce = nonce;
  tx.from = from;
  tx.to = to;
  tx.gas_price = gas_price;
  tx.gas_limit = gas_limit;
  tx.value = value;
  tx.input = std::move(input);
  return tx;
}

ExecutionTrace apply_transaction_in_place(WorldState& world, const Transaction& tx, const GasSchedule& gas,
                                          const ExecOptions& options) {
  return execute(world, tx, gas, options, &world);
}

ApplyResult apply_transaction(const WorldState& world, const Transaction& tx, const GasSchedule& gas,
                              const ExecOptions& options) {
  ApplyResult out{world, {}};
  out.trace = apply_transaction_in_place(out.world, tx, gas, options);
  return out;
}

ExecutionTrace simulate_transaction(const WorldState& world, const Transaction& tx, const GasSchedule& gas,
                                    const ExecOptions& options) {
  return execute(world, tx, gas, options, nullptr);
}

ApplyResult run_flash_loan(const WorldState& world, const Address& provider, const Address& borrower,
                           const Address& token, const Amount& amount, const calldata::CallData& callback,
                           const GasSchedule& gas) {
  auto p = world.providers.find(provider);
  if (p == world.providers.end()) throw Error(ErrorCode::UnknownRecipient, "provider " + provider.hex());
  ApplyResult out{world, {}};
  ExecOptions options{.check_nonce = false, .inject = std::nullopt};
  Executor ex(world, gas, std::numeric_limits<Gas>::max(), borrower, options, out.trace);
  CallData loan{p->second.loan_selector, {borrower.to_word(), token.to_word(), amount_to_word(amount)}, {callback}};
  try {
    ex.call(borrower, provider, loan, 1);
    out.trace.status = TxStatus::Success;
  } catch (const RevertSignal& r) {
    out.trace.status = TxStatus::Reverted;
    out.trace.revert_reason = r.reason;
  } catch (const OutOfGasSignal&) {
    out.trace.status = TxStatus::OutOfGas;
  } catch (const std::exception& e) {
    out.trace.status = TxStatus::Reverted;
    out.trace.revert_reason = e.what();
  }
  out.trace.gas_used = ex.gas_used();
  out.trace.failure_points = ex.points();
  if (out.trace.status == TxStatus::Success) ex.state().commit(out.world);
  return out;
}

void settle_transaction(WorldState& world, const Transaction& tx, const ExecutionTrace& trace,
                        double fee_multiplier) {
  auto& acct = world.accounts[tx.from];
  acct.nonce = tx.nonce + 1;
  Amount fee = Amount(trace.gas_used) * tx.gas_price;
  if (fee_multiplier != 1.0) {
    auto permille = static_cast<std::uint64_t>(fee_multiplier * 1000.0 + 0.5);
    fee = fee * permille / 1000;
  }
  acct.native = acct.native > fee ? acct.native - fee : Amount(0);
}

}  // namespace flashguard::chainsim

namespace flashguard::calldata {

std::set<Selector> trace_selectors(const chainsim::WorldState& world, const chainsim::Transaction& tx,
                                   const chainsim::GasSchedule& gas) {
  auto trace = chainsim::simulate_transaction(world, tx, gas);
  std::set<Selector> out;
  for (const auto& c : trace.internal_calls) out.insert(c.selector);
  return out;
}

}  // namespace flashguard::calldata
