#include "flashguard/disruptor.hpp"

#include <chrono>
#include <fstream>
#include <istream>
#include <ostream>

namespace flashguard::disruptor {

namespace {

using namespace chainsim;
using calldata::CallData;
namespace sel = calldata::selectors;
using Clock = std::chrono::steady_clock;

struct Candidate {
  Amount score{};
  std::map<Address, Amount> best_by_token;
};

void note(std::map<Address, Candidate>& candidates, const Address& who, const Address& token, const Amount& amount) {
  auto& c = candidates[who];
  c.score += amount;
  auto& best = c.best_by_token[token];
  if (amount > best) best = amount;
}

bool word_address(const std::vector<Word>& args, std::size_t i, Address& out) {
  return i < args.size() && Address::from_word(args[i], out);
}

}  // namespace

void SubscriptionRegistry::subscribe(const Address& victim, const Address& token, const Amount& allowance) {
  entries_[victim] = {token, allowance};
}

const SubscriptionEntry* SubscriptionRegistry::find(const Address& victim) const {
  auto it = entries_.find(victim);
  return it == entries_.end() ? nullptr : &it->second;
}

SubscriptionRegistry SubscriptionRegistry::parse(std::istream& in) {
  SubscriptionRegistry out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto c1 = line.find(',');
    auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos)
      throw Error(ErrorCode::ParseError, "subscription line " + std::to_string(lineno) + ": expected 3 fields");
    try {
      out.subscribe(Address::from_hex(line.substr(0, c1), AccountKind::Contract),
                    Address::from_hex(line.substr(c1 + 1, c2 - c1 - 1), AccountKind::Contract),
                    parse_amount(line.substr(c2 + 1)));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ParseError, "subscription line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

SubscriptionRegistry SubscriptionRegistry::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open subscription registry " + path);
  return parse(in);
}

void SubscriptionRegistry::write(std::ostream& out) const {
  for (const auto& [victim, e] : entries_) out << victim.hex() << ',' << e.token.hex() << ',' << e.allowance << '\n';
}

const char* to_string(DisruptionMode m) { return m == DisruptionMode::ABSD ? "ABSD" : "SFSD"; }

calldata::Selector disrupt_selector() {
  static const auto s = calldata::compute_selector("disruptAttack(bool,address,address,uint256)");
  return s;
}

ContractProgram guardian_program() {
  using V = ValueExpr;
  using A = AddrExpr;
  ContractProgram p;
  p.name = "guardian";
  std::vector<Step> steps;

  Step auth;
  auth.name = "auth";
  auth.require.push_back(cmp(V::address_of(A::caller()), CmpOp::Eq, V::storage("operator")));
  steps.push_back(auth);

  // Subscribed victim: burn dust out of the victim through its standing allowance.
  Step absd;
  absd.name = "absd";
  absd.when = cmp(V::arg_at(0), CmpOp::Eq, V::constant_of(1));
  absd.require.push_back(
      cmp(V::allowance(A::arg_at(1), A::arg_at(2), A::self()), CmpOp::Ge, V::arg_at(3)));
  absd.effects.push_back(call(A::arg_at(1), sel::transfer_from,
                              {V::address_of(A::arg_at(2)), V::address_of(A::lit(Address::burn())), V::arg_at(3)}));
  absd.gas_cost = 5000;
  steps.push_back(absd);

  // Unsubscribed victim: pay dust to it from guardian funds.
  Step sfsd;
  sfsd.name = "sfsd";
  sfsd.when = cmp(V::arg_at(0), CmpOp::Eq, V::constant_of(0));
  sfsd.require.push_back(cmp(V::balance(A::arg_at(1), A::self()), CmpOp::Ge, V::arg_at(3)));
  sfsd.effects.push_back(call(A::arg_at(1), sel::transfer, {V::address_of(A::arg_at(2)), V::arg_at(3)}));
  sfsd.gas_cost = 5000;
  steps.push_back(sfsd);

  p.handlers[disrupt_selector()] = std::move(steps);
  return p;
}

void install_guardian(WorldState& world, const GuardianConfig& guardian, const Amount& operator_native) {
  world.add_account(guardian.operator_eoa, operator_native);
  auto& c = world.add_contract(guardian.contract, guardian_program());
  c.storage["operator"] = word_to_amount(guardian.operator_eoa.to_word());
}

DisruptionTarget determine_target(const detector::DetectionVerdict& verdict, const Transaction& tx,
                                  const WorldState& world, const GuardianConfig& guardian, const GasSchedule& gas) {
  if (!verdict.flagged) throw Error(ErrorCode::AmbiguousTarget, "verdict is not flagged");
  ExecutionTrace trace;
  try {
    trace = simulate_transaction(world, tx, gas);
  } catch (const Error& e) {
    throw Error(ErrorCode::AmbiguousTarget, std::string("cannot trace attack: ") + e.what());
  }

  auto eligible = [&](const Address& a) {
    return world.contracts.count(a) && !world.providers.count(a) && !world.is_token(a) && a != tx.from &&
           a != tx.to && a != guardian.contract;
  };

  std::map<Address, Candidate> candidates;
  std::vector<std::size_t> pending_withdrawals;
  for (std::size_t i = 0; i < trace.internal_calls.size(); ++i) {
    const auto& c = trace.internal_calls[i];
    if (c.depth == 0 && !world.is_token(c.callee)) continue;
    Address a;
    if (world.is_token(c.callee)) {
      if (c.selector == sel::approve && word_address(c.args, 0, a) && eligible(a) && c.args.size() > 1) {
        note(candidates, a, c.callee, word_to_amount(c.args[1]));
      } else if (c.selector == sel::transfer && eligible(c.caller) && c.args.size() > 1) {
        note(candidates, c.caller, c.callee, word_to_amount(c.args[1]));
      } else if (c.selector == sel::transfer_from && word_address(c.args, 0, a) && eligible(a) && c.args.size() > 2) {
        note(candidates, a, c.callee, word_to_amount(c.args[2]));
      }
    } else if (c.selector == sel::withdraw && eligible(c.callee) && !c.args.empty()) {
      pending_withdrawals.push_back(i);
    }
  }
  // A withdraw on a contract is attributed to the tokens that contract pays out.
  for (std::size_t idx : pending_withdrawals) {
    const auto& c = trace.internal_calls[idx];
    Amount amount = word_to_amount(c.args[0]);
    for (const auto& f : trace.money_flows)
      if (f.from == c.callee) note(candidates, c.callee, f.token, amount);
  }

  if (candidates.empty()) throw Error(ErrorCode::AmbiguousTarget, "no victim contract in trace");
  const Address* victim = nullptr;
  const Candidate* best = nullptr;
  bool tie = false;
  for (const auto& [addr, cand] : candidates) {
    if (!best || cand.score > best->score) {
      victim = &addr;
      best = &cand;
      tie = false;
    } else if (cand.score == best->score) {
      tie = true;
    }
  }
  if (tie) throw Error(ErrorCode::AmbiguousTarget, "several contracts tie as victim");

  DisruptionTarget out;
  out.victim = *victim;
  out.victim.kind = AccountKind::Contract;
  bool have = false;
  for (const auto& [token, amount] : best->best_by_token) {
    // Map order makes the lowest address win remaining ties.
    if (!have || amount > out.amount) {
      out.token = token;
      out.amount = amount;
      have = true;
    }
  }
  return out;
}

DisruptionPlan plan_dusting(const DisruptionTarget& target, const Hash32& attack_hash,
                            const SubscriptionRegistry& registry, const GuardianConfig& guardian,
                            const WorldState& world, std::uint64_t nonce, const GasSchedule& gas) {
  DisruptionPlan plan;
  plan.victim = target.victim;
  plan.token = target.token;
  plan.dust = guardian.dust;
  plan.target_attack_hash = attack_hash;

  const auto* sub = registry.find(target.victim);
  plan.mode = sub && sub->token == target.token && sub->allowance >= guardian.dust ? DisruptionMode::ABSD
                                                                                   : DisruptionMode::SFSD;
  if (plan.mode == DisruptionMode::SFSD && world.balance_of(target.token, guardian.contract) < guardian.dust)
    throw Error(ErrorCode::InsufficientGuardianFunds,
                "guardian holds " + world.balance_of(target.token, guardian.contract).str() + " of token " +
                    target.token.hex());

  CallData cd{disrupt_selector(),
              {calldata::word(std::uint64_t(plan.mode == DisruptionMode::ABSD ? 1 : 0)), target.token.to_word(),
               target.victim.to_word(), amount_to_word(guardian.dust)},
              {}};
  Bytes input = calldata::encode_call(cd);

  Transaction probe = make_transaction(guardian.operator_eoa, nonce, guardian.contract, guardian.gas_price,
                                       guardian.dry_run_gas, input);
  ExecutionTrace dry = simulate_transaction(world, probe, gas);
  plan.dry_run_gas_used = dry.gas_used;
  plan.dry_run_status = dry.status;
  Gas limit = dry.gas_used + dry.gas_used * guardian.gas_margin_percent / 100 + 1;
  plan.counter_tx = make_transaction(guardian.operator_eoa, nonce, guardian.contract, guardian.gas_price, limit,
                                     std::move(input));
  return plan;
}

Disruptor::Disruptor(GuardianConfig guardian, std::shared_ptr<const SubscriptionRegistry> registry,
                     chainsim::GasSchedule gas)
    : guardian_(std::move(guardian)), registry_(std::move(registry)), gas_(gas) {}

Attempt Disruptor::handle(const detector::DetectionVerdict& verdict, const Transaction& tx, const WorldState& snapshot,
                          relay::RelayQueue& relay, const mempool::PendingPool& pool, std::int64_t now_ms) {
  auto t0 = Clock::now();
  Attempt attempt;
  attempt.target_attack_hash = tx.hash;
  next_nonce_ = std::max(next_nonce_, snapshot.nonce_of(guardian_.operator_eoa));
  try {
    if (targeted_.count(tx.hash)) {
      attempt.receipt = relay::Receipt::Duplicate;
    } else {
      auto target = determine_target(verdict, tx, snapshot, guardian_, gas_);
      attempt.plan = plan_dusting(target, tx.hash, *registry_, guardian_, snapshot, next_nonce_, gas_);
      attempt.receipt = execute_plan(*attempt.plan, relay, pool, now_ms);
      if (*attempt.receipt == relay::Receipt::TooLate) attempt.miss_reason = "target no longer pending";
    }
  } catch (const std::exception& e) {
    attempt.miss_reason = e.what();
  }
  attempt.plan_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
  log_.push_back(attempt);
  return attempt;
}

relay::Receipt Disruptor::execute_plan(const DisruptionPlan& plan, relay::RelayQueue& relay,
                                       const mempool::PendingPool& pool, std::int64_t now_ms) {
  if (targeted_.count(plan.target_attack_hash)) return relay::Receipt::Duplicate;
  auto receipt = relay.submit_private(plan.counter_tx, plan.target_attack_hash, now_ms, pool);
  if (receipt == relay::Receipt::Accepted) {
    targeted_.insert(plan.target_attack_hash);
    next_nonce_ = std::max(next_nonce_, plan.counter_tx.nonce + 1);
  }
  return receipt;
}

void Disruptor::resync(const WorldState& world, std::size_t queued_in_relay) {
  next_nonce_ = world.nonce_of(guardian_.operator_eoa) + queued_in_relay;
}

}  // namespace flashguard::disruptor
