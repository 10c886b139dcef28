#include <gtest/gtest.h>

#include <sstream>

#include "flashguard/disruptor.hpp"
#include "flashguard/scenarios.hpp"

using namespace flashguard;
using namespace flashguard::disruptor;
using chainsim::TxStatus;

namespace {

detector::DetectionVerdict flagged_verdict(const Transaction& tx) {
  return detector::classify(tx, calldata::SignatureDatabase::builtin(), {}, detector::Mode::Scan);
}

const Address kUsdc = Address::from_label("hedgey:USDC", AccountKind::Contract);

}  // namespace

TEST(DetermineTarget, FindsHedgeyCampaign) {
  auto spec = scenarios::build_hedgey_scenario();
  const auto& tx = spec.attack()->tx;
  auto v = flagged_verdict(tx);
  ASSERT_TRUE(v.flagged);
  auto t = determine_target(v, tx, spec.genesis, spec.roles.guardian);
  EXPECT_EQ(t.victim, spec.roles.victim);
  EXPECT_EQ(t.token, kUsdc);
  EXPECT_EQ(t.amount, 1'300'000);
}

TEST(DetermineTarget, RejectsUnflaggedVerdict) {
  auto spec = scenarios::build_hedgey_scenario();
  detector::DetectionVerdict v;
  try {
    determine_target(v, spec.attack()->tx, spec.genesis, spec.roles.guardian);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AmbiguousTarget);
  }
}

TEST(PlanDusting, ModeFollowsSubscription) {
  auto spec = scenarios::build_hedgey_scenario();
  const auto& tx = spec.attack()->tx;
  auto t = determine_target(flagged_verdict(tx), tx, spec.genesis, spec.roles.guardian);

  auto sfsd = plan_dusting(t, tx.hash, spec.subscriptions, spec.roles.guardian, spec.genesis, 0);
  EXPECT_EQ(sfsd.mode, DisruptionMode::SFSD);
  EXPECT_EQ(sfsd.dry_run_status, TxStatus::Success);
  EXPECT_GT(sfsd.counter_tx.gas_limit, sfsd.dry_run_gas_used);

  auto subscribed = spec;
  scenarios::set_subscribed(subscribed, kUsdc, true);
  auto absd = plan_dusting(t, tx.hash, subscribed.subscriptions, subscribed.roles.guardian, subscribed.genesis, 0);
  EXPECT_EQ(absd.mode, DisruptionMode::ABSD);
  EXPECT_EQ(absd.dry_run_status, TxStatus::Success);

  for (const auto* p : {&sfsd, &absd}) {
    const auto& world = p == &sfsd ? spec.genesis : subscribed.genesis;
    auto r = chainsim::apply_transaction(world, p->counter_tx);
    ASSERT_EQ(r.trace.status, TxStatus::Success) << r.trace.revert_reason;
    auto attack = chainsim::apply_transaction(r.world, tx);
    EXPECT_NE(attack.trace.status, TxStatus::Success);
    EXPECT_EQ(attack.world, r.world);
  }
}

TEST(PlanDusting, SubscriptionForOtherTokenFallsBackToSfsd) {
  auto spec = scenarios::build_hedgey_scenario();
  const auto& tx = spec.attack()->tx;
  auto t = determine_target(flagged_verdict(tx), tx, spec.genesis, spec.roles.guardian);
  SubscriptionRegistry reg;
  reg.subscribe(spec.roles.victim, Address::from_label("other token", AccountKind::Contract), 10);
  EXPECT_EQ(plan_dusting(t, tx.hash, reg, spec.roles.guardian, spec.genesis, 0).mode, DisruptionMode::SFSD);
}

TEST(PlanDusting, UnfundedGuardianFails) {
  auto spec = scenarios::build_hedgey_scenario();
  const auto& tx = spec.attack()->tx;
  auto t = determine_target(flagged_verdict(tx), tx, spec.genesis, spec.roles.guardian);
  auto world = spec.genesis;
  world.tokens.at(kUsdc).balances.erase(spec.roles.guardian.contract);
  try {
    plan_dusting(t, tx.hash, spec.subscriptions, spec.roles.guardian, world, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientGuardianFunds);
  }
}

TEST(Disruptor, FailsOpenAndNeverTouchesState) {
  auto spec = scenarios::build_hedgey_scenario();
  const auto& tx = spec.attack()->tx;
  auto world = spec.genesis;
  world.tokens.at(kUsdc).balances.erase(spec.roles.guardian.contract);
  const auto before = world;
  mempool::PendingPool pool;
  pool.submit(tx, 0);
  relay::RelayQueue relay;
  Disruptor d(spec.roles.guardian, std::make_shared<const SubscriptionRegistry>(spec.subscriptions));
  auto a = d.handle(flagged_verdict(tx), tx, world, relay, pool, 1);
  EXPECT_FALSE(a.plan);
  EXPECT_FALSE(a.miss_reason.empty());
  EXPECT_EQ(relay.size(), 0u);
  EXPECT_EQ(world, before);
}

TEST(Disruptor, SubmitsOncePerTarget) {
  auto spec = scenarios::build_hedgey_scenario();
  const auto& tx = spec.attack()->tx;
  mempool::PendingPool pool;
  pool.submit(tx, 0);
  relay::RelayQueue relay;
  Disruptor d(spec.roles.guardian, std::make_shared<const SubscriptionRegistry>(spec.subscriptions));
  auto v = flagged_verdict(tx);
  EXPECT_EQ(d.handle(v, tx, spec.genesis, relay, pool, 1).receipt, relay::Receipt::Accepted);
  EXPECT_EQ(d.handle(v, tx, spec.genesis, relay, pool, 2).receipt, relay::Receipt::Duplicate);
  EXPECT_EQ(relay.size(), 1u);
  EXPECT_EQ(d.log().size(), 2u);
}

TEST(Disruptor, LateVerdictIsAMiss) {
  auto spec = scenarios::build_hedgey_scenario();
  const auto& tx = spec.attack()->tx;
  mempool::PendingPool pool;
  pool.submit(tx, 0);
  chainsim::Block b;
  b.transactions.push_back(tx);
  pool.on_block(b, 12000);
  relay::RelayQueue relay;
  Disruptor d(spec.roles.guardian, std::make_shared<const SubscriptionRegistry>(spec.subscriptions));
  auto a = d.handle(flagged_verdict(tx), tx, spec.genesis, relay, pool, 12001);
  EXPECT_EQ(a.receipt, relay::Receipt::TooLate);
  EXPECT_EQ(a.miss_reason, "target no longer pending");
}

TEST(SubscriptionRegistry, ParseWriteRoundTrip) {
  SubscriptionRegistry reg;
  reg.subscribe(Address::from_label("v1", AccountKind::Contract), kUsdc, 10);
  reg.subscribe(Address::from_label("v2", AccountKind::Contract), kUsdc, 1);
  std::stringstream buf;
  reg.write(buf);
  EXPECT_EQ(SubscriptionRegistry::parse(buf), reg);
  std::stringstream bad("0x00,0x01\n");
  EXPECT_THROW(SubscriptionRegistry::parse(bad), Error);
}
