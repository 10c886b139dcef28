#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flashguard/chainsim.hpp"
#include "flashguard/detector.hpp"
#include "flashguard/disruptor.hpp"

namespace flashguard::scenarios {

using chainsim::ContractProgram;
using chainsim::Transaction;
using chainsim::WorldState;
using calldata::CallData;
using calldata::Selector;

struct ChainProfile {
  std::string name = "ethereum";
  std::int64_t block_interval_ms = 12000;
  chainsim::GasSchedule gas{};
  std::size_t block_capacity = 256;

  bool operator==(const ChainProfile&) const = default;
};

// ethereum, base, arbitrum, polygon, avalanche
ChainProfile chain_profile(std::string_view name);
const std::vector<std::string>& chain_names();

struct Roles {
  Address attacker_eoa;
  Address attacker_contract;
  Address victim;
  Address provider;
  disruptor::GuardianConfig guardian;

  bool operator==(const Roles& o) const {
    return attacker_eoa == o.attacker_eoa && attacker_contract == o.attacker_contract && victim == o.victim &&
           provider == o.provider && guardian.operator_eoa == o.guardian.operator_eoa &&
           guardian.contract == o.guardian.contract && guardian.dust == o.guardian.dust;
  }
};

enum class TrafficRole : std::uint8_t { Attack, Benign, KnownBot, UnknownBot };
const char* to_string(TrafficRole r);
TrafficRole parse_role(std::string_view text);

struct TimedTransaction {
  std::int64_t at_ms = 0;
  Transaction tx;
  TrafficRole role = TrafficRole::Benign;
  std::string label;

  bool operator==(const TimedTransaction&) const = default;
};

struct ScenarioShape {
  std::uint64_t internal_tx_count = 0;  // #txs
  std::uint64_t entity_count = 0;       // #Entities
  std::uint64_t data_dependencies = 0;  // DD
  std::uint64_t money_flow_events = 0;  // MF
  std::uint64_t token_count = 0;        // TK
  Amount expected_loss{};

  bool operator==(const ScenarioShape&) const = default;
};

struct ShapeCounts {
  std::uint64_t internal_tx_count = 0;
  std::uint64_t entity_count = 0;
  std::uint64_t data_dependencies = 0;
  std::uint64_t money_flow_events = 0;
  std::uint64_t token_count = 0;

  bool operator==(const ShapeCounts&) const = default;
};

// Counts recomputed from a trace:
//   #txs      calls at depth >= 1
//   DD        approve calls plus allowance reads
//   MF        money flows
//   TK        distinct tokens called or passed as arguments
//   #Entities distinct non-token addresses among callers, callees, flow endpoints and
//             address arguments known to the world, excluding the originating EOA
ShapeCounts measure_shape(const chainsim::ExecutionTrace& trace, const WorldState& world, const Address& origin);
bool matches(const ShapeCounts& counts, const ScenarioShape& shape);

enum class Mechanism : std::uint8_t { ExactState, GasPath };
const char* to_string(Mechanism m);
Mechanism parse_mechanism(std::string_view text);

struct Expected {
  bool detected = true;
  bool disrupted_absd = true;
  bool disrupted_sfsd = true;
  Amount loss_without_guard{};
  std::optional<ScenarioShape> shape;

  bool operator==(const Expected&) const = default;
};

struct ScenarioSpec {
  std::string name;
  std::string description;
  ChainProfile chain_profile;
  WorldState genesis;
  Roles roles;
  std::vector<TimedTransaction> traffic;
  detector::ExclusionList exclusions;
  disruptor::SubscriptionRegistry subscriptions;
  Expected expected;

  const TimedTransaction* attack() const;
};

// Attack model: the attacker EOA calls its contract, which borrows F from L and, inside the
// loan callback, runs `callbacks` in order (each a call on a target address).
struct Callback {
  Address target;
  CallData call;
};

struct AttackScript {
  Address attacker;
  Address attacker_contract;
  Address victim;
  Address provider;
  Selector loan_selector;
  Address loan_token;
  Amount loan_amount{};
  Selector vulnerable_handler;
  std::map<Address, Amount> extraction;  // expected attacker gain per token
  std::vector<Callback> callbacks;
};

// Forwarding contract used by attackers and arbitrage bots alike.
ContractProgram executor_program(std::string name);
void install_executor(WorldState& world, const Address& contract, const Address& owner, std::string name);
CallData attack_call(const AttackScript& script);
Transaction attack_transaction(const AttackScript& script, std::uint64_t nonce, std::uint64_t gas_price,
                               Gas gas_limit);

Selector selector_of(std::string_view signature);

ScenarioSpec build_hedgey_scenario();

// Grants (or revokes) the victim's standing allowance to the guardian and updates the registry.
void set_subscribed(ScenarioSpec& spec, const Address& token, bool subscribed, const Amount& allowance = 10);

struct ShapeOptions {
  std::string name = "shape";
  std::string chain = "ethereum";
  bool subscribed = false;
  std::size_t benign_count = 12;
  Selector loan_selector = calldata::selectors::flash_loan_a;
};

ScenarioSpec build_shape_scenario(const ScenarioShape& shape, Mechanism mechanism, std::uint64_t seed,
                                  const ShapeOptions& options = {});

struct Preset {
  std::string name;
  std::string chain;
  ScenarioShape shape;
  Mechanism mechanism;
  bool subscribed;
};

const std::vector<Preset>& historical_presets();
ScenarioSpec build_preset(const Preset& preset, std::uint64_t seed = 1);
std::vector<ScenarioSpec> build_all_presets(std::uint64_t seed = 1);

enum class VulnerabilityClass : std::uint8_t { AccessControl, UncheckedReturn, UninitializedStorage };
const char* to_string(VulnerabilityClass v);

ScenarioSpec build_unseen_scenario(VulnerabilityClass cls, disruptor::DisruptionMode mode);
std::vector<ScenarioSpec> build_unseen_scenarios();

// ---- benign traffic ----

struct Market {
  std::string prefix;
  std::vector<Address> tokens;
  Address dex;
  Address vault;
  Address vault_token;
  Address provider;
  Selector loan_selector;
  std::vector<Address> users;
  std::vector<std::pair<Address, Address>> known_bots;    // (eoa, contract)
  std::vector<std::pair<Address, Address>> unknown_bots;  // (eoa, contract)
  std::map<Address, std::uint64_t> next_nonce;
};

struct MarketConfig {
  std::string prefix = "market";
  std::size_t users = 64;
  std::size_t known_bots = 4;
  std::size_t unknown_bots = 4;
  Selector loan_selector = calldata::selectors::flash_loan_b;
};

Market install_market(WorldState& world, const MarketConfig& config);
void exclude_known_bots(const Market& market, detector::ExclusionList& exclusions);
void exclude_all_bots(const Market& market, detector::ExclusionList& exclusions);

struct TrafficProfile {
  std::string name = "default";
  // Relative weights in parts per million.
  std::uint32_t native_ppm = 200'000;
  std::uint32_t transfer_ppm = 250'000;
  std::uint32_t approve_ppm = 120'000;
  std::uint32_t swap_ppm = 300'000;
  std::uint32_t withdraw_ppm = 80'000;
  std::uint32_t known_bot_ppm = 30'000;
  std::uint32_t loan_without_approval_ppm = 20'000;
  // Share of unknown (non-excluded) qualifying bots; realized as an exact count.
  std::uint32_t unknown_bot_ppm = 0;
  std::int64_t start_ms = 0;
  std::int64_t span_ms = 12000;
};

// Five chain-flavoured profiles with distinct unknown-bot shares.
std::vector<TrafficProfile> default_profiles();
std::size_t unknown_bot_count(const TrafficProfile& profile, std::size_t count);

std::vector<TimedTransaction> generate_benign_traffic(Market& market, const TrafficProfile& profile,
                                                      std::size_t count, std::uint64_t seed);

// Attack-free scenario on a fresh market. Known bots are excluded; unknown bots only when asked.
ScenarioSpec build_benign_corpus(const TrafficProfile& profile, std::size_t count, std::uint64_t seed,
                                 bool exclude_unknown_bots = false);

}  // namespace flashguard::scenarios
