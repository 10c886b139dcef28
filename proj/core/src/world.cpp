#include <stdexcept>

#include "flashguard/chainsim/program.hpp"
#include "flashguard/chainsim/world.hpp"

namespace flashguard::chainsim {

ValueExpr ValueExpr::constant_of(const Amount& v) {
  ValueExpr e;
  e.kind = Kind::Const;
  e.constant = v;
  return e;
}

ValueExpr ValueExpr::arg_at(std::size_t i) {
  ValueExpr e;
  e.kind = Kind::Arg;
  e.arg = i;
  return e;
}

ValueExpr ValueExpr::balance(const AddrExpr& token, const AddrExpr& holder) {
  ValueExpr e;
  e.kind = Kind::Balance;
  e.token = token;
  e.a = holder;
  return e;
}

ValueExpr ValueExpr::allowance(const AddrExpr& token, const AddrExpr& owner, const AddrExpr& spender) {
  ValueExpr e;
  e.kind = Kind::Allowance;
  e.token = token;
  e.a = owner;
  e.b = spender;
  return e;
}

ValueExpr ValueExpr::storage(std::string slot) {
  ValueExpr e;
  e.kind = Kind::Storage;
  e.slot = std::move(slot);
  return e;
}

ValueExpr ValueExpr::storage_at(std::string slot, ValueExpr key) {
  ValueExpr e = storage(std::move(slot));
  e.operands.push_back(std::move(key));
  return e;
}

ValueExpr ValueExpr::add(ValueExpr x, ValueExpr y) {
  ValueExpr e;
  e.kind = Kind::Add;
  e.operands = {std::move(x), std::move(y)};
  return e;
}

ValueExpr ValueExpr::sub(ValueExpr x, ValueExpr y) {
  ValueExpr e;
  e.kind = Kind::Sub;
  e.operands = {std::move(x), std::move(y)};
  return e;
}

ValueExpr ValueExpr::address_of(const AddrExpr& a) {
  ValueExpr e;
  e.kind = Kind::AddressOf;
  e.a = a;
  return e;
}

std::string storage_key(const std::string& slot, const std::optional<Amount>& key) {
  if (!key) return slot;
  return slot + "[" + key->str() + "]";
}

Condition cmp(ValueExpr lhs, CmpOp op, ValueExpr rhs) { return Condition{std::move(lhs), op, std::move(rhs)}; }

CallEffect call(AddrExpr target, Selector selector, std::vector<ValueExpr> args, bool check_return) {
  return CallEffect{target, selector, std::move(args), check_return};
}

StoreEffect store(std::string slot, ValueExpr value) { return StoreEffect{std::move(slot), std::nullopt, std::move(value)}; }

StoreEffect store_at(std::string slot, ValueExpr key, ValueExpr value) {
  return StoreEffect{std::move(slot), std::move(key), std::move(value)};
}

Amount TokenLedger::balance_of(const Address& a) const {
  auto it = balances.find(a);
  return it == balances.end() ? Amount(0) : it->second;
}

Amount TokenLedger::allowance(const Address& owner, const Address& spender) const {
  auto it = allowances.find({owner, spender});
  return it == allowances.end() ? Amount(0) : it->second;
}

bool ContractAccount::operator==(const ContractAccount& other) const {
  if (storage != other.storage) return false;
  if (program == other.program) return true;
  if (!program || !other.program) return false;
  return *program == *other.program;
}

Amount FlashLoanProvider::fee_for(const Amount& amount) const {
  if (fee_numerator == 0) return 0;
  Amount num = amount * fee_numerator;
  return (num + fee_denominator - 1) / fee_denominator;
}

bool WorldState::exists(const Address& a) const {
  return accounts.count(a) || contracts.count(a) || providers.count(a) || tokens.count(a);
}

std::uint64_t WorldState::nonce_of(const Address& a) const {
  auto it = accounts.find(a);
  return it == accounts.end() ? 0 : it->second.nonce;
}

Amount WorldState::native_of(const Address& a) const {
  auto it = accounts.find(a);
  return it == accounts.end() ? Amount(0) : it->second.native;
}

Amount WorldState::balance_of(const Address& token, const Address& holder) const {
  auto it = tokens.find(token);
  return it == tokens.end() ? Amount(0) : it->second.balance_of(holder);
}

Account& WorldState::add_account(const Address& a, const Amount& native) {
  auto& acct = accounts[a];
  acct.native = native;
  acct.kind = a.kind;
  return acct;
}

TokenLedger& WorldState::add_token(const Address& token, std::string symbol, bool returns_false_on_failure) {
  auto& t = tokens[token];
  t.token_id = token;
  t.symbol = std::move(symbol);
  t.returns_false_on_failure = returns_false_on_failure;
  return t;
}

void WorldState::mint(const Address& token, const Address& to, const Amount& amount) {
  auto it = tokens.find(token);
  if (it == tokens.end()) throw std::invalid_argument("mint on unknown token " + token.hex());
  if (amount == 0) return;
  it->second.balances[to] += amount;
  it->second.total_supply += amount;
}

void WorldState::set_allowance(const Address& token, const Address& owner, const Address& spender,
                               const Amount& amount) {
  auto it = tokens.find(token);
  if (it == tokens.end()) throw std::invalid_argument("approve on unknown token " + token.hex());
  if (amount == 0)
    it->second.allowances.erase({owner, spender});
  else
    it->second.allowances[{owner, spender}] = amount;
}

ContractAccount& WorldState::add_contract(const Address& a, ContractProgram program) {
  auto& c = contracts[a];
  c.program = std::make_shared<const ContractProgram>(std::move(program));
  return c;
}

FlashLoanProvider& WorldState::add_provider(FlashLoanProvider provider) {
  Address a = provider.address;
  auto& p = providers[a];
  p = std::move(provider);
  return p;
}

void WorldState::snapshot_provider_liquidity() {
  for (auto& [addr, p] : providers) {
    p.genesis_liquidity.clear();
    for (const auto& [tok, ledger] : tokens) {
      Amount bal = ledger.balance_of(addr);
      if (bal > 0) p.genesis_liquidity[tok] = bal;
    }
  }
}

bool supply_consistent(const WorldState& world) {
  for (const auto& [addr, t] : world.tokens) {
    Amount sum = 0;
    for (const auto& [holder, bal] : t.balances) sum += bal;
    if (sum != t.total_supply) return false;
  }
  return true;
}

bool providers_solvent(const WorldState& world) {
  for (const auto& [addr, p] : world.providers)
    for (const auto& [tok, amount] : p.genesis_liquidity)
      if (world.balance_of(tok, addr) < amount) return false;
  return true;
}

}  // namespace flashguard::chainsim
