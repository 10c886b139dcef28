#include <gtest/gtest.h>

#include <random>

#include "flashguard/scenarios.hpp"

using namespace flashguard;
using namespace flashguard::scenarios;
using chainsim::TxStatus;

namespace {

Amount victim_loss(const ScenarioSpec& spec, const chainsim::WorldState& after) {
  Amount loss = 0;
  for (const auto& [token, ledger] : spec.genesis.tokens) {
    Amount b0 = ledger.balance_of(spec.roles.victim);
    Amount b1 = after.tokens.at(token).balance_of(spec.roles.victim);
    if (b1 < b0) loss += b0 - b1;
  }
  return loss;
}

}  // namespace

TEST(Presets, TwentyRowsWithFrozenShapes) {
  const auto& p = historical_presets();
  ASSERT_EQ(p.size(), 20u);
  Amount total = 0;
  for (const auto& row : p) total += row.shape.expected_loss;
  EXPECT_EQ(total, Amount(405'707'500));
  EXPECT_EQ(p[0].mechanism, Mechanism::ExactState);
  EXPECT_EQ(p[1].mechanism, Mechanism::GasPath);
}

TEST(Presets, AttackReproducesShapeAndLoss) {
  for (const auto& preset : historical_presets()) {
    auto spec = build_preset(preset);
    const auto* atk = spec.attack();
    ASSERT_NE(atk, nullptr) << preset.name;
    auto r = chainsim::apply_transaction(spec.genesis, atk->tx);
    ASSERT_EQ(r.trace.status, TxStatus::Success) << preset.name << ": " << r.trace.revert_reason;
    auto counts = measure_shape(r.trace, spec.genesis, atk->tx.from);
    EXPECT_TRUE(matches(counts, preset.shape)) << preset.name;
    EXPECT_EQ(victim_loss(spec, r.world), preset.shape.expected_loss) << preset.name;
    EXPECT_EQ(spec.expected.loss_without_guard, preset.shape.expected_loss) << preset.name;
    EXPECT_TRUE(chainsim::providers_solvent(r.world)) << preset.name;
    EXPECT_TRUE(chainsim::supply_consistent(r.world)) << preset.name;
    EXPECT_EQ(spec.chain_profile.name, preset.chain);
  }
}

TEST(Presets, GenesisIsSound) {
  for (const auto& spec : build_all_presets()) {
    EXPECT_TRUE(chainsim::supply_consistent(spec.genesis)) << spec.name;
    for (std::size_t i = 1; i < spec.traffic.size(); ++i)
      EXPECT_LE(spec.traffic[i - 1].at_ms, spec.traffic[i].at_ms) << spec.name;
    std::size_t attacks = 0;
    for (const auto& t : spec.traffic) attacks += t.role == TrafficRole::Attack;
    EXPECT_EQ(attacks, 1u) << spec.name;
  }
}

TEST(ShapeGenerator, RandomFeasibleShapesReproduce) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 40; ++i) {
    ScenarioShape s;
    s.data_dependencies = 1 + rng() % 6;
    s.money_flow_events = 3 + rng() % 10;
    s.token_count = 1 + rng() % 4;
    s.internal_tx_count = 3 + s.data_dependencies + s.money_flow_events + rng() % 12;
    s.entity_count = 4 + rng() % 10;
    s.expected_loss = 1000 + rng() % 1'000'000;
    auto mech = i % 2 ? Mechanism::GasPath : Mechanism::ExactState;
    ScenarioSpec spec;
    try {
      spec = build_shape_scenario(s, mech, i);
    } catch (const Error& e) {
      ASSERT_EQ(e.code(), ErrorCode::InfeasibleShape);
      continue;
    }
    auto r = chainsim::apply_transaction(spec.genesis, spec.attack()->tx);
    ASSERT_EQ(r.trace.status, TxStatus::Success) << i;
    EXPECT_TRUE(matches(measure_shape(r.trace, spec.genesis, spec.attack()->tx.from), s)) << i;
    EXPECT_EQ(victim_loss(spec, r.world), s.expected_loss) << i;
  }
}

TEST(ShapeGenerator, InfeasibleShapesThrow) {
  ScenarioShape s{5, 5, 3, 4, 1, 100};
  try {
    build_shape_scenario(s, Mechanism::ExactState, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleShape);
  }
  ScenarioShape zero_loss{20, 8, 2, 5, 1, 0};
  EXPECT_THROW(build_shape_scenario(zero_loss, Mechanism::ExactState, 1), Error);
}

TEST(ShapeGenerator, DeterministicPerSeed) {
  const auto& p = historical_presets()[3];
  auto a = build_preset(p, 7);
  auto b = build_preset(p, 7);
  EXPECT_EQ(a.genesis, b.genesis);
  EXPECT_EQ(a.traffic, b.traffic);
}

TEST(Unseen, SixCellsWithExpectedMatrix) {
  auto specs = build_unseen_scenarios();
  ASSERT_EQ(specs.size(), 6u);
  int sfsd_yes = 0;
  int absd_yes = 0;
  for (const auto& s : specs) {
    absd_yes += s.subscriptions.entries().empty() ? 0 : s.expected.disrupted_absd;
    sfsd_yes += s.subscriptions.entries().empty() ? s.expected.disrupted_sfsd : 0;
    auto r = chainsim::apply_transaction(s.genesis, s.attack()->tx);
    EXPECT_EQ(r.trace.status, TxStatus::Success) << s.name;
    EXPECT_EQ(victim_loss(s, r.world), s.expected.loss_without_guard) << s.name;
  }
  EXPECT_EQ(absd_yes, 3);
  EXPECT_EQ(sfsd_yes, 1);
}

TEST(BenignTraffic, ExactUnknownBotCount) {
  TrafficProfile p;
  p.unknown_bot_ppm = 1600;
  EXPECT_EQ(unknown_bot_count(p, 10'000), 16u);
  EXPECT_EQ(unknown_bot_count(p, 0), 0u);
  auto corpus = build_benign_corpus(p, 10'000, 3);
  std::size_t unknown = 0;
  for (const auto& t : corpus.traffic) unknown += t.role == TrafficRole::UnknownBot;
  EXPECT_EQ(unknown, 16u);
  EXPECT_EQ(corpus.traffic.size(), 10'000u);
  EXPECT_EQ(corpus.attack(), nullptr);
}

TEST(BenignTraffic, DeterministicAndSeedSensitive) {
  auto profiles = default_profiles();
  ASSERT_EQ(profiles.size(), 5u);
  auto a = build_benign_corpus(profiles[0], 500, 11);
  auto b = build_benign_corpus(profiles[0], 500, 11);
  auto c = build_benign_corpus(profiles[0], 500, 12);
  EXPECT_EQ(a.traffic, b.traffic);
  EXPECT_NE(a.traffic, c.traffic);
}

TEST(BenignTraffic, TransactionsExecuteInOrder) {
  auto corpus = build_benign_corpus(default_profiles()[3], 2000, 5);
  auto w = corpus.genesis;
  std::size_t ok = 0;
  for (const auto& t : corpus.traffic) {
    auto trace = chainsim::apply_transaction_in_place(w, t.tx);
    chainsim::settle_transaction(w, t.tx, trace);
    ok += trace.status == TxStatus::Success;
  }
  EXPECT_EQ(ok, corpus.traffic.size());
}

TEST(ChainProfiles, KnownNames) {
  EXPECT_EQ(chain_profile("arbitrum").block_interval_ms, 1000);
  EXPECT_EQ(chain_profile("ethereum").block_interval_ms, 12000);
  EXPECT_THROW(chain_profile("solana"), Error);
}
