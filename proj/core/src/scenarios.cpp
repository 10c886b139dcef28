#include "flashguard/scenarios.hpp"

#include <algorithm>
#include <functional>

namespace flashguard::scenarios {

namespace {

using namespace chainsim;
using V = ValueExpr;
using A = AddrExpr;
namespace sel = calldata::selectors;

const Amount kEoaNative = Amount("1000000000000000000000000");
constexpr Gas kDryRunLimit = 500'000'000;
constexpr std::uint64_t kAttackGasPrice = 150;
constexpr std::int64_t kAttackAtMs = 3000;

Address contract(const std::string& label) { return Address::from_label(label, AccountKind::Contract); }

Word amount_word(const Amount& a) { return amount_to_word(a); }

disruptor::GuardianConfig default_guardian() {
  disruptor::GuardianConfig g;
  g.operator_eoa = Address::from_label("guardian:operator");
  g.contract = contract("guardian:contract");
  return g;
}

// Common genesis for a single attack: attacker, its contract, the guardian and a small
// known-bot market providing background traffic.
struct Stage {
  ScenarioSpec spec;
  Market market;
};

Stage make_stage(const std::string& name, const std::string& chain) {
  Stage st;
  st.spec.name = name;
  st.spec.chain_profile = chain_profile(chain);
  auto& w = st.spec.genesis;
  auto& r = st.spec.roles;
  r.attacker_eoa = Address::from_label(name + ":attacker");
  r.attacker_contract = contract(name + ":attacker-contract");
  r.guardian = default_guardian();
  w.add_account(r.attacker_eoa, kEoaNative);
  install_executor(w, r.attacker_contract, r.attacker_eoa, "attacker");
  disruptor::install_guardian(w, r.guardian, kEoaNative);

  MarketConfig mc;
  mc.prefix = name + ":market";
  mc.users = 16;
  mc.known_bots = 2;
  mc.unknown_bots = 0;
  st.market = install_market(w, mc);
  exclude_known_bots(st.market, st.spec.exclusions);
  return st;
}

void add_benign(Stage& st, std::size_t count, std::uint64_t seed) {
  if (count == 0) return;
  TrafficProfile p;
  p.name = "background";
  p.loan_without_approval_ppm = 0;
  p.span_ms = st.spec.chain_profile.block_interval_ms;
  auto traffic = generate_benign_traffic(st.market, p, count, seed);
  st.spec.traffic.insert(st.spec.traffic.end(), traffic.begin(), traffic.end());
}

// Dry-runs the attack on genesis, then fixes its gas limit with a 10% margin.
Transaction finalize_attack(const WorldState& world, const AttackScript& script) {
  Transaction probe = attack_transaction(script, 0, kAttackGasPrice, kDryRunLimit);
  auto trace = simulate_transaction(world, probe);
  if (trace.status != TxStatus::Success)
    throw Error(ErrorCode::InfeasibleShape, "attack does not succeed on genesis: " + trace.revert_reason);
  return attack_transaction(script, 0, kAttackGasPrice, trace.gas_used + trace.gas_used / 10 + 1);
}

void add_attack(ScenarioSpec& spec, Transaction tx, std::string label) {
  TimedTransaction t;
  t.at_ms = kAttackAtMs;
  t.tx = std::move(tx);
  t.role = TrafficRole::Attack;
  t.label = std::move(label);
  spec.traffic.push_back(std::move(t));
  std::stable_sort(spec.traffic.begin(), spec.traffic.end(),
                   [](const TimedTransaction& a, const TimedTransaction& b) { return a.at_ms < b.at_ms; });
}

// Exact-state sync check: the contract's holdings must equal its bookkeeping.
Step exact_state_step(const Address& token) {
  Step s;
  s.name = "sync";
  s.require.push_back(cmp(V::balance(A::lit(token), A::self()), CmpOp::Eq, V::storage("reserve")));
  return s;
}

// Reconciliation path: burns `gas` whenever holdings drift from bookkeeping.
Step gas_path_step(const Address& token, Gas gas) {
  Step s;
  s.name = "reconcile";
  s.when = cmp(V::balance(A::lit(token), A::self()), CmpOp::Ne, V::storage("reserve"));
  s.gas_cost = gas;
  return s;
}

// Fires only when holdings fall below the recorded floor.
Step deficit_step(const Address& token, Gas gas) {
  Step s;
  s.name = "solvency";
  s.when = cmp(V::balance(A::lit(token), A::self()), CmpOp::Lt, V::storage("floor"));
  s.gas_cost = gas;
  return s;
}

Callback cb(const Address& target, Selector s, std::vector<Word> args) { return {target, CallData{s, std::move(args), {}}}; }

// Builds the victim with a provisional reconcile gas, measures the attack, and rebuilds with
// the reconcile gas equal to the attack's gas limit.
Transaction install_victim_and_attack(ScenarioSpec& spec, const Address& victim,
                                      const std::function<ContractProgram(Gas)>& program,
                                      const std::map<std::string, Amount>& storage, const AttackScript& script) {
  auto install = [&](Gas g) {
    auto& c = spec.genesis.add_contract(victim, program(g));
    c.storage = storage;
  };
  install(0);
  spec.genesis.snapshot_provider_liquidity();
  Transaction tx = finalize_attack(spec.genesis, script);
  install(tx.gas_limit);
  auto check = simulate_transaction(spec.genesis, tx);
  if (check.status != TxStatus::Success) throw Error(ErrorCode::InfeasibleShape, "attack fails after gas fix-up");
  return tx;
}

}  // namespace

const char* to_string(TrafficRole r) {
  switch (r) {
    case TrafficRole::Attack: return "attack";
    case TrafficRole::Benign: return "benign";
    case TrafficRole::KnownBot: return "known_bot";
    case TrafficRole::UnknownBot: return "unknown_bot";
  }
  return "benign";
}

TrafficRole parse_role(std::string_view text) {
  for (auto r : {TrafficRole::Attack, TrafficRole::Benign, TrafficRole::KnownBot, TrafficRole::UnknownBot})
    if (text == to_string(r)) return r;
  throw Error(ErrorCode::ParseError, "unknown traffic role '" + std::string(text) + "'");
}

const char* to_string(Mechanism m) { return m == Mechanism::ExactState ? "exact_state" : "gas_path"; }

Mechanism parse_mechanism(std::string_view text) {
  if (text == "exact_state") return Mechanism::ExactState;
  if (text == "gas_path") return Mechanism::GasPath;
  throw Error(ErrorCode::ParseError, "unknown mechanism '" + std::string(text) + "'");
}

const char* to_string(VulnerabilityClass v) {
  switch (v) {
    case VulnerabilityClass::AccessControl: return "access_control";
    case VulnerabilityClass::UncheckedReturn: return "unchecked_return";
    case VulnerabilityClass::UninitializedStorage: return "uninitialized_storage";
  }
  return "access_control";
}

const TimedTransaction* ScenarioSpec::attack() const {
  for (const auto& t : traffic)
    if (t.role == TrafficRole::Attack) return &t;
  return nullptr;
}

ChainProfile chain_profile(std::string_view name) {
  ChainProfile p;
  p.name = std::string(name);
  if (name == "ethereum") p.block_interval_ms = 12000;
  else if (name == "base") p.block_interval_ms = 2000;
  else if (name == "arbitrum") p.block_interval_ms = 1000;
  else if (name == "polygon") p.block_interval_ms = 2000;
  else if (name == "avalanche") p.block_interval_ms = 2000;
  else throw Error(ErrorCode::ConfigError, "unknown chain profile '" + std::string(name) + "'");
  return p;
}

const std::vector<std::string>& chain_names() {
  static const std::vector<std::string> names = {"ethereum", "base", "arbitrum", "polygon", "avalanche"};
  return names;
}

Selector selector_of(std::string_view signature) { return calldata::compute_selector(signature); }

ContractProgram executor_program(std::string name) {
  ContractProgram p;
  p.name = std::move(name);
  Step run;
  run.name = "owner";
  run.require.push_back(cmp(V::address_of(A::origin()), CmpOp::Eq, V::storage("owner")));
  run.effects.push_back(ForwardEffect{0});
  p.handlers[sel::execute] = {run};
  Step callback;
  callback.name = "callback";
  callback.effects.push_back(ForwardEffect{3});
  p.handlers[sel::on_flash_loan] = {callback};
  return p;
}

void install_executor(WorldState& world, const Address& c, const Address& owner, std::string name) {
  auto& acct = world.add_contract(c, executor_program(std::move(name)));
  acct.storage["owner"] = word_to_amount(owner.to_word());
}

CallData attack_call(const AttackScript& script) {
  CallData loan{script.loan_selector,
                {script.attacker_contract.to_word(), script.loan_token.to_word(), amount_word(script.loan_amount)},
                {}};
  for (const auto& c : script.callbacks) {
    loan.args.push_back(c.target.to_word());
    loan.nested.push_back(c.call);
  }
  return CallData{sel::execute, {script.provider.to_word()}, {loan}};
}

Transaction attack_transaction(const AttackScript& script, std::uint64_t nonce, std::uint64_t gas_price,
                               Gas gas_limit) {
  return make_transaction(script.attacker, nonce, script.attacker_contract, gas_price, gas_limit,
                          calldata::encode_call(attack_call(script)));
}

void set_subscribed(ScenarioSpec& spec, const Address& token, bool subscribed, const Amount& allowance) {
  const Address& victim = spec.roles.victim;
  const Address& guardian = spec.roles.guardian.contract;
  if (subscribed) {
    spec.genesis.set_allowance(token, victim, guardian, allowance);
    spec.subscriptions.subscribe(victim, token, allowance);
  } else {
    spec.genesis.set_allowance(token, victim, guardian, 0);
    disruptor::SubscriptionRegistry rest;
    for (const auto& [v, e] : spec.subscriptions.entries())
      if (v != victim) rest.subscribe(v, e.token, e.allowance);
    spec.subscriptions = rest;
  }
}

ScenarioSpec build_hedgey_scenario() {
  Stage st = make_stage("hedgey", "ethereum");
  auto& spec = st.spec;
  auto& w = spec.genesis;
  spec.description = "Campaign contract leaves the creator's token approval in place after cancellation";

  Address usdc = contract("hedgey:USDC");
  Address lender = contract("hedgey:lender");
  Address campaign = contract("hedgey:campaign");
  spec.roles.victim = campaign;
  spec.roles.provider = lender;
  const Amount vault = 1'300'000;
  const Amount loan = 1'300'000;

  w.add_token(usdc, "USDC");
  FlashLoanProvider p;
  p.address = lender;
  p.name = "lender-a";
  p.loan_selector = sel::flash_loan_a;
  w.add_provider(p);
  w.mint(usdc, lender, 10'000'000);
  w.mint(usdc, campaign, vault);
  w.mint(usdc, spec.roles.guardian.contract, 1000);

  Selector create = selector_of("createLockedCampaign(uint256,uint256)");
  Selector cancel = selector_of("cancelCampaign(uint256)");

  auto program = [&](Gas) {
    ContractProgram prog;
    prog.name = "campaign";
    Step c;
    c.name = "create";
    c.require.push_back(cmp(V::storage_at("active", V::arg_at(0)), CmpOp::Eq, V::constant_of(0)));
    c.require.push_back(cmp(V::arg_at(1), CmpOp::Gt, V::constant_of(0)));
    c.effects.push_back(
        call(A::lit(usdc), sel::transfer_from, {V::address_of(A::caller()), V::address_of(A::self()), V::arg_at(1)}));
    c.effects.push_back(store_at("active", V::arg_at(0), V::constant_of(1)));
    c.effects.push_back(store_at("amount", V::arg_at(0), V::arg_at(1)));
    c.effects.push_back(store_at("manager", V::arg_at(0), V::address_of(A::caller())));
    c.effects.push_back(store("reserve", V::add(V::storage("reserve"), V::arg_at(1))));
    c.effects.push_back(call(A::lit(usdc), sel::approve, {V::address_of(A::caller()), V::arg_at(1)}));
    c.gas_cost = 20000;
    prog.handlers[create] = {c};

    Step refund;
    refund.name = "refund";
    refund.require.push_back(cmp(V::storage_at("manager", V::arg_at(0)), CmpOp::Eq, V::address_of(A::caller())));
    refund.require.push_back(cmp(V::storage_at("active", V::arg_at(0)), CmpOp::Eq, V::constant_of(1)));
    refund.effects.push_back(store_at("active", V::arg_at(0), V::constant_of(0)));
    refund.effects.push_back(store("reserve", V::sub(V::storage("reserve"), V::storage_at("amount", V::arg_at(0)))));
    refund.effects.push_back(
        call(A::lit(usdc), sel::transfer, {V::address_of(A::caller()), V::storage_at("amount", V::arg_at(0))}));
    refund.gas_cost = 10000;
    prog.handlers[cancel] = {exact_state_step(usdc), refund};
    return prog;
  };

  const Address& a = spec.roles.attacker_contract;
  AttackScript s;
  s.attacker = spec.roles.attacker_eoa;
  s.attacker_contract = a;
  s.victim = campaign;
  s.provider = lender;
  s.loan_selector = sel::flash_loan_a;
  s.loan_token = usdc;
  s.loan_amount = loan;
  s.vulnerable_handler = cancel;
  s.extraction[usdc] = vault;
  s.callbacks = {
      cb(usdc, sel::approve, {campaign.to_word(), amount_word(loan)}),
      cb(campaign, create, {calldata::word(1), amount_word(loan)}),
      cb(campaign, cancel, {calldata::word(1)}),
      cb(usdc, sel::transfer_from, {campaign.to_word(), a.to_word(), amount_word(vault)}),
      cb(usdc, sel::transfer, {lender.to_word(), amount_word(loan)}),
  };
  Transaction tx = install_victim_and_attack(spec, campaign, program, {{"reserve", vault}}, s);
  add_benign(st, 12, 7);
  add_attack(spec, tx, "hedgey-exploit");

  spec.expected.detected = true;
  spec.expected.disrupted_absd = true;
  spec.expected.disrupted_sfsd = true;
  spec.expected.loss_without_guard = vault;
  return spec;
}

ScenarioSpec build_shape_scenario(const ScenarioShape& shape, Mechanism mechanism, std::uint64_t seed,
                                  const ShapeOptions& options) {
  const std::uint64_t n = shape.internal_tx_count, e = shape.entity_count, d = shape.data_dependencies,
                      m = shape.money_flow_events, k = shape.token_count;
  if (k < 1 || e < 3 || d < 1 || m < 3)
    throw Error(ErrorCode::InfeasibleShape, "shape needs TK>=1, #Entities>=3, DD>=1, MF>=3");
  const std::uint64_t fixed = 3 + d + m;
  if (n < fixed)
    throw Error(ErrorCode::InfeasibleShape,
                "#txs " + std::to_string(n) + " below minimum " + std::to_string(fixed) + " for DD and MF");
  const std::uint64_t views = n - fixed;
  const std::uint64_t drains = m - 2;
  const Amount& loss = shape.expected_loss;
  if (loss < Amount(2 * drains)) throw Error(ErrorCode::InfeasibleShape, "loss too small for the money-flow count");

  const std::string& tag = options.name;
  Stage st = make_stage(tag, options.chain);
  auto& spec = st.spec;
  auto& w = spec.genesis;

  std::vector<Address> tokens;
  for (std::uint64_t i = 0; i < k; ++i) {
    Address t = contract(tag + ":token-" + std::to_string(i));
    w.add_token(t, i == 0 ? "USD" : "TK" + std::to_string(i));
    tokens.push_back(t);
  }
  Address lender = contract(tag + ":lender");
  Address victim = contract(tag + ":victim");
  spec.roles.victim = victim;
  spec.roles.provider = lender;
  FlashLoanProvider p;
  p.address = lender;
  p.name = options.loan_selector == sel::flash_loan_a ? "lender-a" : "lender-b";
  p.loan_selector = options.loan_selector;
  w.add_provider(p);
  const Amount loan = loss;
  w.mint(tokens[0], lender, loan * 2);
  w.mint(tokens[0], spec.roles.guardian.contract, 1000);

  std::vector<Address> extras;
  for (std::uint64_t i = 0; i + 3 < e; ++i) {
    Address x = Address::from_label(tag + ":entity-" + std::to_string(i));
    w.add_account(x, 0);
    extras.push_back(x);
  }

  // Drain 0 carries the bulk on the loan token; the rest spread over all tokens.
  Amount q = loss / (2 * drains);
  std::vector<std::pair<std::size_t, Amount>> payouts;
  payouts.emplace_back(0, loss - q * (drains - 1));
  for (std::uint64_t i = 1; i < drains; ++i) payouts.emplace_back(i % k, q);
  std::map<std::size_t, Amount> holdings;
  for (const auto& [t, amt] : payouts) holdings[t] += amt;
  for (const auto& [t, amt] : holdings) w.mint(tokens[t], victim, amt);

  Selector settle = selector_of("settle(address[])");
  auto program = [&](Gas reconcile) {
    ContractProgram prog;
    prog.name = "victim";
    Step pay;
    pay.name = "payout";
    for (const auto& [t, amt] : payouts)
      pay.effects.push_back(call(A::lit(tokens[t]), sel::transfer, {V::address_of(A::caller()), V::constant_of(amt)}));
    pay.gas_cost = 10000;
    Step guard = mechanism == Mechanism::ExactState ? exact_state_step(tokens[0]) : gas_path_step(tokens[0], reconcile);
    prog.handlers[settle] = {guard, pay};
    return prog;
  };

  const Address& a = spec.roles.attacker_contract;
  AttackScript s;
  s.attacker = spec.roles.attacker_eoa;
  s.attacker_contract = a;
  s.victim = victim;
  s.provider = lender;
  s.loan_selector = options.loan_selector;
  s.loan_token = tokens[0];
  s.loan_amount = loan;
  s.vulnerable_handler = settle;
  for (const auto& [t, amt] : holdings) s.extraction[tokens[t]] = amt;

  s.callbacks.push_back(cb(tokens[0], sel::approve, {victim.to_word(), amount_word(loan)}));
  for (std::uint64_t i = 0; i + 1 < d; ++i)
    s.callbacks.push_back(cb(tokens[(i + 1) % k], sel::approve, {victim.to_word(), calldata::word(1 + i)}));
  std::vector<Word> settle_args;
  for (const auto& t : tokens) settle_args.push_back(t.to_word());
  for (const auto& x : extras) settle_args.push_back(x.to_word());
  s.callbacks.push_back(cb(victim, settle, settle_args));
  for (std::uint64_t i = 0; i < views; ++i)
    s.callbacks.push_back(cb(tokens[i % k], sel::balance_of, {victim.to_word()}));
  s.callbacks.push_back(cb(tokens[0], sel::transfer, {lender.to_word(), amount_word(loan)}));

  Transaction tx = install_victim_and_attack(spec, victim, program, {{"reserve", holdings[0]}}, s);
  if (options.subscribed) set_subscribed(spec, tokens[0], true);
  add_benign(st, options.benign_count, seed);
  add_attack(spec, tx, tag + "-exploit");

  spec.description = "Synthetic attack with a fixed call-graph shape";
  spec.expected.detected = true;
  spec.expected.disrupted_absd = true;
  spec.expected.disrupted_sfsd = true;
  spec.expected.loss_without_guard = loss;
  spec.expected.shape = shape;
  return spec;
}

const std::vector<Preset>& historical_presets() {
  struct Row {
    const char* name;
    std::uint64_t txs, entities, dd, mf, tk;
    const char* chain;
    std::uint64_t loss;
  };
  static const Row rows[] = {
      {"Hedgey", 10, 3, 3, 4, 1, "ethereum", 2'000'000},
      {"Sumer", 65, 8, 1, 19, 5, "base", 350'000},
      {"LavaLending", 187, 24, 16, 80, 9, "arbitrum", 340'000},
      {"PRISMAFI", 75, 22, 4, 29, 9, "ethereum", 11'600'000},
      {"Rosa", 51, 23, 3, 16, 15, "arbitrum", 44'670},
      {"Themis", 129, 24, 15, 46, 21, "arbitrum", 367'750},
      {"JIMBO", 373, 12, 16, 117, 3, "arbitrum", 7'500'000},
      {"EON", 23, 31, 9, 10, 20, "polygon", 29'200},
      {"Ovix", 736, 40, 66, 278, 21, "polygon", 2'000'000},
      {"Euler", 56, 4, 2, 20, 4, "ethereum", 196'000'000},
      {"Platypus", 72, 17, 2, 22, 19, "avalanche", 8'500'000},
      {"Midas", 207, 33, 27, 87, 3, "polygon", 650'000},
      {"Cauldron", 70, 15, 10, 29, 8, "avalanche", 370'000},
      {"Cream", 164, 39, 5, 69, 29, "ethereum", 130'000'000},
      {"XTOKEN", 248, 18, 23, 40, 3, "ethereum", 24'500'000},
      {"Warp", 57, 3, 3, 12, 3, "ethereum", 7'800'000},
      {"Akropolis", 123, 10, 8, 69, 4, "ethereum", 2'000'000},
      {"Origin", 156, 3, 4, 12, 2, "ethereum", 8'000'000},
      {"Cheese", 64, 11, 21, 5, 6, "ethereum", 3'300'000},
      {"bZx", 43, 14, 1, 17, 6, "ethereum", 355'880},
  };
  static const std::vector<Preset> presets = [] {
    std::vector<Preset> out;
    std::size_t i = 0;
    for (const auto& r : rows) {
      Preset p;
      p.name = r.name;
      p.chain = r.chain;
      p.shape = {r.txs, r.entities, r.dd, r.mf, r.tk, Amount(r.loss)};
      p.mechanism = i % 2 == 0 ? Mechanism::ExactState : Mechanism::GasPath;
      p.subscribed = (i / 2) % 2 == 1;
      out.push_back(p);
      ++i;
    }
    return out;
  }();
  return presets;
}

ScenarioSpec build_preset(const Preset& preset, std::uint64_t seed) {
  ShapeOptions o;
  o.name = preset.name;
  o.chain = preset.chain;
  o.subscribed = preset.subscribed;
  o.loan_selector = seed % 2 == 0 ? sel::flash_loan_b : sel::flash_loan_a;
  return build_shape_scenario(preset.shape, preset.mechanism, seed, o);
}

std::vector<ScenarioSpec> build_all_presets(std::uint64_t seed) {
  std::vector<ScenarioSpec> out;
  for (const auto& p : historical_presets()) out.push_back(build_preset(p, seed));
  return out;
}

ScenarioSpec build_unseen_scenario(VulnerabilityClass cls, disruptor::DisruptionMode mode) {
  const bool absd = mode == disruptor::DisruptionMode::ABSD;
  std::string tag = std::string("unseen-") + to_string(cls) + "-" + (absd ? "absd" : "sfsd");
  Stage st = make_stage(tag, "ethereum");
  auto& spec = st.spec;
  auto& w = spec.genesis;

  Address token = contract(tag + ":USDS");
  Address lender = contract(tag + ":lender");
  Address victim = contract(tag + ":victim");
  spec.roles.victim = victim;
  spec.roles.provider = lender;
  const Amount funds = 50'000;
  const Amount loan = 100'000;

  w.add_token(token, "USDS", cls == VulnerabilityClass::UncheckedReturn);
  FlashLoanProvider p;
  p.address = lender;
  p.name = "lender-b";
  p.loan_selector = sel::flash_loan_b;
  w.add_provider(p);
  w.mint(token, lender, 1'000'000);
  w.mint(token, victim, funds);
  w.mint(token, spec.roles.guardian.contract, 1000);

  const Address& a = spec.roles.attacker_contract;
  AttackScript s;
  s.attacker = spec.roles.attacker_eoa;
  s.attacker_contract = a;
  s.victim = victim;
  s.provider = lender;
  s.loan_selector = sel::flash_loan_b;
  s.loan_token = token;
  s.loan_amount = loan;
  s.extraction[token] = funds;

  auto pull = [&](std::size_t arg, bool check) {
    return call(A::lit(token), sel::transfer_from, {V::address_of(A::caller()), V::address_of(A::self()), V::arg_at(arg)},
                check);
  };

  std::function<ContractProgram(Gas)> program;
  std::map<std::string, Amount> storage;
  switch (cls) {
    case VulnerabilityClass::AccessControl: {
      Selector deposit = selector_of("deposit(uint256)");
      Selector sweep = selector_of("sweep(address,uint256)");
      program = [=](Gas) {
        ContractProgram prog;
        prog.name = "pool";
        Step dep;
        dep.name = "deposit";
        dep.effects.push_back(pull(0, true));
        dep.effects.push_back(store("reserve", V::add(V::storage("reserve"), V::arg_at(0))));
        auto shares = V::storage_at("shares", V::address_of(A::caller()));
        dep.effects.push_back(store_at("shares", V::address_of(A::caller()), V::add(shares, V::arg_at(0))));
        dep.gas_cost = 10000;
        prog.handlers[deposit] = {dep};
        Step sw;
        sw.name = "sweep";
        sw.effects.push_back(store("reserve", V::sub(V::storage("reserve"), V::arg_at(1))));
        sw.effects.push_back(call(A::lit(token), sel::transfer, {V::address_of(A::arg_at(0)), V::arg_at(1)}));
        sw.gas_cost = 10000;
        prog.handlers[sweep] = {exact_state_step(token), sw};
        return prog;
      };
      storage = {{"reserve", funds}};
      s.vulnerable_handler = sweep;
      s.callbacks = {
          cb(token, sel::approve, {victim.to_word(), amount_word(loan)}),
          cb(victim, deposit, {amount_word(loan)}),
          cb(victim, sweep, {a.to_word(), amount_word(funds + loan)}),
          cb(token, sel::transfer, {lender.to_word(), amount_word(loan)}),
      };
      spec.description = "Pool exposes an unrestricted sweep function";
      spec.expected.disrupted_absd = true;
      spec.expected.disrupted_sfsd = true;
      break;
    }
    case VulnerabilityClass::UncheckedReturn: {
      Selector deposit = selector_of("deposit(uint256)");
      program = [=](Gas g) {
        ContractProgram prog;
        prog.name = "vault";
        Step dep;
        dep.name = "deposit";
        dep.effects.push_back(pull(0, false));
        auto credit = V::storage_at("credit", V::address_of(A::caller()));
        dep.effects.push_back(store_at("credit", V::address_of(A::caller()), V::add(credit, V::arg_at(0))));
        dep.gas_cost = 10000;
        prog.handlers[deposit] = {deficit_step(token, g), dep};
        Step wd;
        wd.name = "withdraw";
        wd.require.push_back(cmp(credit, CmpOp::Ge, V::arg_at(0)));
        wd.effects.push_back(store_at("credit", V::address_of(A::caller()), V::sub(credit, V::arg_at(0))));
        wd.effects.push_back(call(A::lit(token), sel::transfer, {V::address_of(A::caller()), V::arg_at(0)}));
        wd.gas_cost = 10000;
        prog.handlers[sel::withdraw] = {wd};
        return prog;
      };
      storage = {{"floor", funds}};
      s.vulnerable_handler = deposit;
      s.callbacks = {
          cb(token, sel::approve, {victim.to_word(), amount_word(loan)}),
          cb(victim, deposit, {amount_word(loan)}),
          cb(victim, deposit, {amount_word(funds)}),
          cb(victim, sel::withdraw, {amount_word(loan + funds)}),
          cb(token, sel::transfer, {lender.to_word(), amount_word(loan)}),
      };
      spec.description = "Vault credits deposits without checking the token's return value";
      spec.expected.disrupted_absd = true;
      spec.expected.disrupted_sfsd = false;
      break;
    }
    case VulnerabilityClass::UninitializedStorage: {
      Selector reg = selector_of("register(uint256)");
      Selector emergency = selector_of("emergencyWithdraw(address,uint256)");
      program = [=](Gas g) {
        ContractProgram prog;
        prog.name = "staking";
        Step r;
        r.name = "register";
        r.require.push_back(cmp(V::arg_at(0), CmpOp::Ge, V::constant_of(10'000)));
        r.effects.push_back(pull(0, true));
        auto stake = V::storage_at("stake", V::address_of(A::caller()));
        r.effects.push_back(store_at("stake", V::address_of(A::caller()), V::add(stake, V::arg_at(0))));
        // The per-user record aliases the admin slot.
        r.effects.push_back(store("owner", V::address_of(A::caller())));
        r.gas_cost = 10000;
        prog.handlers[reg] = {deficit_step(token, g), r};
        Step ew;
        ew.name = "emergency";
        ew.require.push_back(cmp(V::storage("owner"), CmpOp::Eq, V::address_of(A::caller())));
        ew.effects.push_back(call(A::lit(token), sel::transfer, {V::address_of(A::arg_at(0)), V::arg_at(1)}));
        ew.gas_cost = 10000;
        prog.handlers[emergency] = {ew};
        return prog;
      };
      storage = {{"floor", funds}};
      s.vulnerable_handler = reg;
      s.callbacks = {
          cb(token, sel::approve, {victim.to_word(), amount_word(loan)}),
          cb(victim, reg, {amount_word(loan)}),
          cb(victim, emergency, {a.to_word(), amount_word(funds + loan)}),
          cb(token, sel::transfer, {lender.to_word(), amount_word(loan)}),
      };
      spec.description = "Staking contract overwrites its owner slot on registration";
      spec.expected.disrupted_absd = true;
      spec.expected.disrupted_sfsd = false;
      break;
    }
  }

  Transaction tx = install_victim_and_attack(spec, victim, program, storage, s);
  if (absd) set_subscribed(spec, token, true);
  add_benign(st, 12, 11);
  add_attack(spec, tx, tag + "-exploit");
  spec.expected.detected = true;
  spec.expected.loss_without_guard = funds;
  return spec;
}

std::vector<ScenarioSpec> build_unseen_scenarios() {
  std::vector<ScenarioSpec> out;
  for (auto cls : {VulnerabilityClass::AccessControl, VulnerabilityClass::UncheckedReturn,
                   VulnerabilityClass::UninitializedStorage})
    for (auto mode : {disruptor::DisruptionMode::ABSD, disruptor::DisruptionMode::SFSD})
      out.push_back(build_unseen_scenario(cls, mode));
  return out;
}

}  // namespace flashguard::scenarios
