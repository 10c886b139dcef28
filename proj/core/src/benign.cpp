#include <algorithm>
#include <random>
#include <set>

#include "flashguard/scenarios.hpp"

namespace flashguard::scenarios {

namespace {

using namespace chainsim;
using V = ValueExpr;
using A = AddrExpr;
namespace sel = calldata::selectors;

const Amount kHuge = Amount("1000000000000000000000000000000");

std::uint64_t uniform(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
  return lo + rng() % (hi - lo + 1);
}

ContractProgram dex_program() {
  ContractProgram p;
  p.name = "dex";
  Step swap;
  swap.name = "swap";
  swap.effects.push_back(call(A::arg_at(0), sel::transfer_from,
                              {V::address_of(A::caller()), V::address_of(A::self()), V::arg_at(2)}));
  swap.effects.push_back(call(A::arg_at(1), sel::transfer, {V::address_of(A::caller()), V::arg_at(2)}));
  swap.gas_cost = 8000;
  p.handlers[selector_of("swap(address,address,uint256)")] = {swap};
  return p;
}

ContractProgram vault_program(const Address& token) {
  ContractProgram p;
  p.name = "vault";
  Step w;
  w.name = "withdraw";
  auto credit = V::storage_at("credit", V::address_of(A::caller()));
  w.require.push_back(cmp(credit, CmpOp::Ge, V::arg_at(0)));
  w.effects.push_back(store_at("credit", V::address_of(A::caller()), V::sub(credit, V::arg_at(0))));
  w.effects.push_back(call(A::lit(token), sel::transfer, {V::address_of(A::caller()), V::arg_at(0)}));
  w.gas_cost = 6000;
  p.handlers[sel::withdraw] = {w};
  return p;
}

std::uint64_t take_nonce(Market& m, const Address& a) { return m.next_nonce[a]++; }

Transaction arbitrage(Market& m, const std::pair<Address, Address>& bot, std::mt19937_64& rng) {
  const Address& t0 = m.tokens[uniform(rng, 0, m.tokens.size() - 1)];
  Address t1 = m.tokens[uniform(rng, 0, m.tokens.size() - 1)];
  if (t1 == t0) t1 = m.tokens[(std::find(m.tokens.begin(), m.tokens.end(), t0) - m.tokens.begin() + 1) % m.tokens.size()];
  Amount f = uniform(rng, 10'000, 5'000'000);
  Selector swap = selector_of("swap(address,address,uint256)");
  AttackScript s;
  s.attacker = bot.first;
  s.attacker_contract = bot.second;
  s.provider = m.provider;
  s.loan_selector = m.loan_selector;
  s.loan_token = t0;
  s.loan_amount = f;
  s.callbacks = {
      {t0, {sel::approve, {m.dex.to_word(), amount_to_word(f)}, {}}},
      {t1, {sel::approve, {m.dex.to_word(), amount_to_word(f)}, {}}},
      {m.dex, {swap, {t0.to_word(), t1.to_word(), amount_to_word(f)}, {}}},
      {m.dex, {swap, {t1.to_word(), t0.to_word(), amount_to_word(f)}, {}}},
      {t0, {sel::transfer, {m.provider.to_word(), amount_to_word(f)}, {}}},
  };
  return attack_transaction(s, take_nonce(m, bot.first), uniform(rng, 20, 120), 2'000'000);
}

Transaction loan_without_approval(Market& m, const std::pair<Address, Address>& bot, std::mt19937_64& rng) {
  const Address& t0 = m.tokens[uniform(rng, 0, m.tokens.size() - 1)];
  Amount f = uniform(rng, 10'000, 1'000'000);
  AttackScript s;
  s.attacker = bot.first;
  s.attacker_contract = bot.second;
  s.provider = m.provider;
  s.loan_selector = m.loan_selector;
  s.loan_token = t0;
  s.loan_amount = f;
  s.callbacks = {{t0, {sel::transfer, {m.provider.to_word(), amount_to_word(f)}, {}}}};
  return attack_transaction(s, take_nonce(m, bot.first), uniform(rng, 5, 80), 1'000'000);
}

}  // namespace

Market install_market(WorldState& world, const MarketConfig& config) {
  Market m;
  m.prefix = config.prefix;
  const char* symbols[] = {"USDC", "WETH", "DAI", "WBTC"};
  for (const char* sym : symbols) {
    Address t = Address::from_label(config.prefix + ":" + sym, AccountKind::Contract);
    world.add_token(t, sym);
    m.tokens.push_back(t);
  }

  m.provider = Address::from_label(config.prefix + ":lender", AccountKind::Contract);
  m.loan_selector = config.loan_selector;
  FlashLoanProvider p;
  p.address = m.provider;
  p.name = config.prefix + "-lender";
  p.loan_selector = config.loan_selector;
  world.add_provider(p);

  m.dex = Address::from_label(config.prefix + ":dex", AccountKind::Contract);
  world.add_contract(m.dex, dex_program());
  m.vault_token = m.tokens[0];
  m.vault = Address::from_label(config.prefix + ":vault", AccountKind::Contract);
  auto& vault = world.add_contract(m.vault, vault_program(m.vault_token));

  for (const auto& t : m.tokens) {
    world.mint(t, m.provider, Amount("1000000000000"));
    world.mint(t, m.dex, Amount("1000000000000"));
  }
  world.mint(m.vault_token, m.vault, Amount("1000000000000"));

  for (std::size_t i = 0; i < config.users; ++i) {
    Address u = Address::from_label(config.prefix + ":user-" + std::to_string(i));
    world.add_account(u, kHuge);
    for (const auto& t : m.tokens) {
      world.mint(t, u, Amount(1'000'000'000));
      world.set_allowance(t, u, m.dex, kHuge);
    }
    vault.storage[storage_key("credit", word_to_amount(u.to_word()))] = 1'000'000;
    m.users.push_back(u);
  }

  auto make_bots = [&](const std::string& kind, std::size_t n, auto& out) {
    for (std::size_t i = 0; i < n; ++i) {
      std::string base = config.prefix + ":" + kind + "-" + std::to_string(i);
      Address eoa = Address::from_label(base);
      Address contract = Address::from_label(base + "-contract", AccountKind::Contract);
      world.add_account(eoa, kHuge);
      install_executor(world, contract, eoa, kind);
      out.emplace_back(eoa, contract);
    }
  };
  make_bots("known-bot", config.known_bots, m.known_bots);
  make_bots("unknown-bot", config.unknown_bots, m.unknown_bots);
  return m;
}

void exclude_known_bots(const Market& market, detector::ExclusionList& exclusions) {
  for (const auto& [eoa, contract] : market.known_bots) {
    exclusions.add(eoa, "known MEV bot");
    exclusions.add(contract, "known MEV bot contract");
  }
}

void exclude_all_bots(const Market& market, detector::ExclusionList& exclusions) {
  exclude_known_bots(market, exclusions);
  for (const auto& [eoa, contract] : market.unknown_bots) {
    exclusions.add(eoa, "arbitrage bot");
    exclusions.add(contract, "arbitrage bot contract");
  }
}

std::vector<TrafficProfile> default_profiles() {
  std::vector<TrafficProfile> out;
  auto make = [&](std::string name, std::uint32_t unknown_ppm, std::uint32_t swap_ppm, std::uint32_t bot_ppm) {
    TrafficProfile p;
    p.name = std::move(name);
    p.unknown_bot_ppm = unknown_ppm;
    p.swap_ppm = swap_ppm;
    p.known_bot_ppm = bot_ppm;
    out.push_back(p);
  };
  make("ethereum", 300, 300'000, 30'000);
  make("base", 500, 320'000, 40'000);
  make("arbitrum", 900, 340'000, 50'000);
  make("polygon", 1600, 280'000, 60'000);
  make("avalanche", 400, 260'000, 35'000);
  return out;
}

std::size_t unknown_bot_count(const TrafficProfile& profile, std::size_t count) {
  return static_cast<std::size_t>((static_cast<std::uint64_t>(count) * profile.unknown_bot_ppm + 500'000) / 1'000'000);
}

std::vector<TimedTransaction> generate_benign_traffic(Market& m, const TrafficProfile& profile, std::size_t count,
                                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<TimedTransaction> out;
  out.reserve(count);

  std::size_t unknown = std::min(count, unknown_bot_count(profile, count));
  if (unknown > 0 && m.unknown_bots.empty()) throw Error(ErrorCode::ConfigError, "profile needs unknown bots");
  std::set<std::size_t> unknown_at;
  while (unknown_at.size() < unknown) unknown_at.insert(rng() % count);

  bool have_bots = !m.known_bots.empty();
  bool have_other_bots = !m.unknown_bots.empty();
  const std::uint32_t weights[] = {
      profile.native_ppm,
      profile.transfer_ppm,
      profile.approve_ppm,
      profile.swap_ppm,
      profile.withdraw_ppm,
      have_bots ? profile.known_bot_ppm : 0,
      have_other_bots ? profile.loan_without_approval_ppm : 0,
  };
  std::uint64_t total = 0;
  for (auto w : weights) total += w;
  if (total == 0 && unknown < count) throw Error(ErrorCode::ConfigError, "profile has no traffic weights");

  const std::uint64_t swap_gas = 200'000;
  Selector swap = selector_of("swap(address,address,uint256)");
  auto pick_user = [&] { return m.users[rng() % m.users.size()]; };
  auto pick_token = [&] { return m.tokens[rng() % m.tokens.size()]; };

  for (std::size_t i = 0; i < count; ++i) {
    TimedTransaction t;
    t.at_ms = profile.start_ms + static_cast<std::int64_t>(i) * profile.span_ms / static_cast<std::int64_t>(count);
    if (unknown_at.count(i)) {
      t.tx = arbitrage(m, m.unknown_bots[rng() % m.unknown_bots.size()], rng);
      t.role = TrafficRole::UnknownBot;
      t.label = "arbitrage-unlisted";
      out.push_back(std::move(t));
      continue;
    }
    std::uint64_t draw = rng() % total;
    std::size_t kind = 0;
    while (draw >= weights[kind]) draw -= weights[kind++];

    Address from = pick_user();
    std::uint64_t price = uniform(rng, 1, 100);
    switch (kind) {
      case 0: {
        Address to = pick_user();
        t.tx = make_transaction(from, take_nonce(m, from), to, price, 21'000, {}, Amount(uniform(rng, 1, 1'000'000)));
        t.label = "native-transfer";
        break;
      }
      case 1: {
        CallData cd{sel::transfer, {pick_user().to_word(), calldata::word(uniform(rng, 1, 1000))}, {}};
        t.tx = make_transaction(from, take_nonce(m, from), pick_token(), price, 100'000, calldata::encode_call(cd));
        t.label = "token-transfer";
        break;
      }
      case 2: {
        CallData cd{sel::approve, {pick_user().to_word(), calldata::word(uniform(rng, 1, 1'000'000))}, {}};
        t.tx = make_transaction(from, take_nonce(m, from), pick_token(), price, 100'000, calldata::encode_call(cd));
        t.label = "approve";
        break;
      }
      case 3: {
        Address a = pick_token();
        Address b = pick_token();
        CallData cd{swap, {a.to_word(), b.to_word(), calldata::word(uniform(rng, 1, 1000))}, {}};
        t.tx = make_transaction(from, take_nonce(m, from), m.dex, price, swap_gas, calldata::encode_call(cd));
        t.label = "swap";
        break;
      }
      case 4: {
        CallData cd{sel::withdraw, {calldata::word(uniform(rng, 1, 100))}, {}};
        t.tx = make_transaction(from, take_nonce(m, from), m.vault, price, swap_gas, calldata::encode_call(cd));
        t.label = "withdraw";
        break;
      }
      case 5: {
        t.tx = arbitrage(m, m.known_bots[rng() % m.known_bots.size()], rng);
        t.role = TrafficRole::KnownBot;
        t.label = "arbitrage-listed";
        break;
      }
      default: {
        t.tx = loan_without_approval(m, m.unknown_bots[rng() % m.unknown_bots.size()], rng);
        t.label = "flash-loan-no-approval";
        break;
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

ScenarioSpec build_benign_corpus(const TrafficProfile& profile, std::size_t count, std::uint64_t seed,
                                 bool exclude_unknown_bots) {
  ScenarioSpec spec;
  spec.name = "corpus-" + profile.name;
  spec.description = "Benign traffic sample";
  auto names = chain_names();
  spec.chain_profile = chain_profile(std::find(names.begin(), names.end(), profile.name) != names.end()
                                         ? profile.name
                                         : std::string("ethereum"));
  spec.roles.guardian.operator_eoa = Address::from_label("guardian:operator");
  spec.roles.guardian.contract = Address::from_label("guardian:contract", AccountKind::Contract);
  disruptor::install_guardian(spec.genesis, spec.roles.guardian, kHuge);
  MarketConfig mc;
  mc.prefix = spec.name;
  Market m = install_market(spec.genesis, mc);
  if (exclude_unknown_bots)
    exclude_all_bots(m, spec.exclusions);
  else
    exclude_known_bots(m, spec.exclusions);
  spec.genesis.snapshot_provider_liquidity();
  spec.traffic = generate_benign_traffic(m, profile, count, seed);
  spec.expected.detected = false;
  spec.expected.disrupted_absd = false;
  spec.expected.disrupted_sfsd = false;
  return spec;
}

}  // namespace flashguard::scenarios
