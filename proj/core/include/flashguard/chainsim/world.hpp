#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include "flashguard/address.hpp"
#include "flashguard/calldata.hpp"
#include "flashguard/chainsim/program.hpp"
#include "flashguard/types.hpp"

namespace flashguard::chainsim {

struct Account {
  Amount native{};
  std::uint64_t nonce = 0;
  AccountKind kind = AccountKind::EOA;

  bool operator==(const Account&) const = default;
};

struct TokenLedger {
  Address token_id;
  std::string symbol;
  std::map<Address, Amount> balances;
  std::map<std::pair<Address, Address>, Amount> allowances;  // (owner, spender)
  Amount total_supply{};
  // Report failure by returning false instead of reverting.
  bool returns_false_on_failure = false;

  Amount balance_of(const Address& a) const;
  Amount allowance(const Address& owner, const Address& spender) const;

  bool operator==(const TokenLedger&) const = default;
};

struct ContractAccount {
  std::shared_ptr<const ContractProgram> program;
  std::map<std::string, Amount> storage;

  bool operator==(const ContractAccount& other) const;
};

struct FlashLoanProvider {
  Address address;
  std::string name;
  Selector loan_selector;
  Selector callback_selector = calldata::selectors::on_flash_loan;
  // fee = ceil(amount * fee_numerator / fee_denominator)
  std::uint64_t fee_numerator = 0;
  std::uint64_t fee_denominator = 1;
  std::map<Address, Amount> genesis_liquidity;

  Amount fee_for(const Amount& amount) const;

  bool operator==(const FlashLoanProvider&) const = default;
};

struct WorldState {
  std::map<Address, Account> accounts;
  std::map<Address, TokenLedger> tokens;
  std::map<Address, ContractAccount> contracts;
  std::map<Address, FlashLoanProvider> providers;
  std::uint64_t block_height = 0;

  bool exists(const Address& a) const;
  bool is_token(const Address& a) const { return tokens.count(a) != 0; }
  bool is_contract(const Address& a) const { return contracts.count(a) != 0 || providers.count(a) != 0 || is_token(a); }
  std::uint64_t nonce_of(const Address& a) const;
  Amount native_of(const Address& a) const;
  Amount balance_of(const Address& token, const Address& holder) const;

  // Genesis helpers.
  Account& add_account(const Address& a, const Amount& native = 0);
  TokenLedger& add_token(const Address& token, std::string symbol, bool returns_false_on_failure = false);
  void mint(const Address& token, const Address& to, const Amount& amount);
  void set_allowance(const Address& token, const Address& owner, const Address& spender, const Amount& amount);
  ContractAccount& add_contract(const Address& a, ContractProgram program);
  FlashLoanProvider& add_provider(FlashLoanProvider provider);
  // Records current provider balances as genesis liquidity.
  void snapshot_provider_liquidity();

  bool operator==(const WorldState&) const = default;
};

// Sum of balances equals total supply for every token.
bool supply_consistent(const WorldState& world);
// Every provider holds at least its genesis liquidity.
bool providers_solvent(const WorldState& world);

}  // namespace flashguard::chainsim
