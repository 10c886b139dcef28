#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flashguard/address.hpp"
#include "flashguard/calldata.hpp"
#include "flashguard/chainsim/world.hpp"
#include "flashguard/types.hpp"

namespace flashguard::chainsim {

struct Transaction {
  Hash32 hash;
  std::uint64_t nonce = 0;
  Address from;
  Address to;
  std::uint64_t gas_price = 0;  // gwei
  Gas gas_limit = 0;
  Amount value{};
  Bytes input;

  bool operator==(const Transaction&) const = default;
};

// Hash is derived from (from, nonce) so it is unique per sender slot.
Hash32 transaction_hash(const Address& from, std::uint64_t nonce);
Transaction make_transaction(const Address& from, std::uint64_t nonce, const Address& to, std::uint64_t gas_price,
                             Gas gas_limit, Bytes input, const Amount& value = 0);

enum class TxStatus : std::uint8_t { Success, Reverted, OutOfGas };
const char* to_string(TxStatus s);

struct InternalCall {
  Address caller;
  Address callee;
  calldata::Selector selector;
  std::vector<Word> args;
  std::uint32_t depth = 0;

  bool operator==(const InternalCall&) const = default;
};

struct MoneyFlow {
  Address token;
  Address from;
  Address to;
  Amount amount{};

  bool operator==(const MoneyFlow&) const = default;
};

struct ExecutionTrace {
  Hash32 tx_hash;
  std::vector<InternalCall> internal_calls;
  TxStatus status = TxStatus::Success;
  std::string revert_reason;
  Gas gas_used = 0;
  std::vector<MoneyFlow> money_flows;
  // Number of failure-injection points reached (one per step and built-in check).
  std::size_t failure_points = 0;

  bool operator==(const ExecutionTrace&) const = default;
};

struct GasSchedule {
  Gas intrinsic = 21000;
  Gas call = 2600;
  Gas token_transfer = 29000;
  Gas token_approve = 24000;
  Gas token_view = 2600;
  Gas flash_loan = 40000;
  Gas storage_write = 5000;

  bool operator==(const GasSchedule&) const = default;
};

struct FailureInjection {
  enum class Kind : std::uint8_t { GuardFailure, GasExhaustion };
  std::size_t point = 0;
  Kind kind = Kind::GuardFailure;
};

struct ExecOptions {
  bool check_nonce = true;
  std::optional<FailureInjection> inject;
};

// Executes tx against `world` in place. On Reverted/OutOfGas the world is left untouched.
// Nonce and fee settlement are not applied here; see settle_transaction.
ExecutionTrace apply_transaction_in_place(WorldState& world, const Transaction& tx, const GasSchedule& gas = {},
                                          const ExecOptions& options = {});

struct ApplyResult {
  WorldState world;
  ExecutionTrace trace;
};
ApplyResult apply_transaction(const WorldState& world, const Transaction& tx, const GasSchedule& gas = {},
                              const ExecOptions& options = {});

// Speculative execution on a snapshot; the snapshot is never modified.
ExecutionTrace simulate_transaction(const WorldState& world, const Transaction& tx, const GasSchedule& gas = {},
                                    const ExecOptions& options = {.check_nonce = false, .inject = std::nullopt});

// Borrower-initiated loan outside a transaction envelope (unbounded gas).
ApplyResult run_flash_loan(const WorldState& world, const Address& provider, const Address& borrower,
                           const Address& token, const Amount& amount, const calldata::CallData& callback,
                           const GasSchedule& gas = {});

// Increments the sender nonce and charges gas_used * gas_price * premium to the sender.
void settle_transaction(WorldState& world, const Transaction& tx, const ExecutionTrace& trace,
                        double fee_multiplier = 1.0);

}  // namespace flashguard::chainsim

namespace flashguard::calldata {

// Selectors of every internal call in a speculative execution of tx.
std::set<Selector> trace_selectors(const chainsim::WorldState& world, const chainsim::Transaction& tx,
                                   const chainsim::GasSchedule& gas = {});

}  // namespace flashguard::calldata
