#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flashguard/chainsim/execution.hpp"
#include "flashguard/chainsim/program.hpp"
#include "flashguard/detector.hpp"
#include "flashguard/mempool.hpp"
#include "flashguard/relay.hpp"

namespace flashguard::disruptor {

using chainsim::Transaction;
using chainsim::WorldState;

struct SubscriptionEntry {
  Address token;
  Amount allowance{};

  bool operator==(const SubscriptionEntry&) const = default;
};

class SubscriptionRegistry {
 public:
  void subscribe(const Address& victim, const Address& token, const Amount& allowance);
  const SubscriptionEntry* find(const Address& victim) const;
  const std::map<Address, SubscriptionEntry>& entries() const { return entries_; }

  // Line format: victim_address,token_address,allowance
  static SubscriptionRegistry parse(std::istream& in);
  static SubscriptionRegistry load(const std::string& path);
  void write(std::ostream& out) const;

  bool operator==(const SubscriptionRegistry&) const = default;

 private:
  std::map<Address, SubscriptionEntry> entries_;
};

enum class DisruptionMode : std::uint8_t { ABSD, SFSD };
const char* to_string(DisruptionMode m);

struct GuardianConfig {
  Address operator_eoa;   // signs counter transactions
  Address contract;       // holds SFSD funds and ABSD allowances
  Amount dust = 1;
  std::uint64_t gas_price = 1;
  Gas dry_run_gas = 2'000'000;
  std::uint32_t gas_margin_percent = 25;
};

// disruptAttack(bool subscribed, address token, address victim, uint256 dust)
calldata::Selector disrupt_selector();
chainsim::ContractProgram guardian_program();
// Deploys the guardian contract and funds the operator account with native gas money.
void install_guardian(WorldState& world, const GuardianConfig& guardian, const Amount& operator_native);

struct DisruptionTarget {
  Address victim;
  Address token;
  Amount amount{};  // largest qualifying amount seen for (victim, token)
};

// Locates the victim contract and exploited token from a speculative trace of tx.
DisruptionTarget determine_target(const detector::DetectionVerdict& verdict, const Transaction& tx,
                                  const WorldState& world, const GuardianConfig& guardian,
                                  const chainsim::GasSchedule& gas = {});

struct DisruptionPlan {
  DisruptionMode mode = DisruptionMode::SFSD;
  Address victim;
  Address token;
  Amount dust{};
  Transaction counter_tx;
  Hash32 target_attack_hash;
  Gas dry_run_gas_used = 0;
  chainsim::TxStatus dry_run_status = chainsim::TxStatus::Success;
};

DisruptionPlan plan_dusting(const DisruptionTarget& target, const Hash32& attack_hash,
                            const SubscriptionRegistry& registry, const GuardianConfig& guardian,
                            const WorldState& world, std::uint64_t nonce, const chainsim::GasSchedule& gas = {});

struct Attempt {
  Hash32 target_attack_hash;
  std::optional<DisruptionPlan> plan;
  std::optional<relay::Receipt> receipt;
  std::string miss_reason;  // set when the attack proceeds unopposed
  double plan_ms = 0;       // monotonic: verdict handling to relay receipt
};

// Consumes flagged verdicts. Any failure is logged as a miss and never touches state.
class Disruptor {
 public:
  Disruptor(GuardianConfig guardian, std::shared_ptr<const SubscriptionRegistry> registry,
            chainsim::GasSchedule gas = {});

  Attempt handle(const detector::DetectionVerdict& verdict, const Transaction& tx, const WorldState& snapshot,
                 relay::RelayQueue& relay, const mempool::PendingPool& pool, std::int64_t now_ms);
  relay::Receipt execute_plan(const DisruptionPlan& plan, relay::RelayQueue& relay,
                              const mempool::PendingPool& pool, std::int64_t now_ms);
  // Call after each block so counter nonces follow confirmed state.
  void resync(const WorldState& world, std::size_t queued_in_relay);

  const std::vector<Attempt>& log() const { return log_; }
  const GuardianConfig& guardian() const { return guardian_; }

 private:
  GuardianConfig guardian_;
  std::shared_ptr<const SubscriptionRegistry> registry_;
  chainsim::GasSchedule gas_;
  std::set<Hash32> targeted_;
  std::uint64_t next_nonce_ = 0;
  std::vector<Attempt> log_;
};

}  // namespace flashguard::disruptor
