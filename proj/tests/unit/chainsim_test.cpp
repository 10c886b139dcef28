#include <gtest/gtest.h>

#include "flashguard/chainsim.hpp"
#include "flashguard/scenarios.hpp"

using namespace flashguard;
using namespace flashguard::chainsim;
namespace sel = calldata::selectors;

namespace {

struct Fixture {
  WorldState w;
  Address token = Address::from_label("t:USD", AccountKind::Contract);
  Address lenient = Address::from_label("t:LEN", AccountKind::Contract);
  Address alice = Address::from_label("t:alice");
  Address bob = Address::from_label("t:bob");
  Address lender = Address::from_label("t:lender", AccountKind::Contract);
  Address borrower = Address::from_label("t:borrower", AccountKind::Contract);

  Fixture() {
    w.add_token(token, "USD");
    w.add_token(lenient, "LEN", true);
    w.add_account(alice, Amount("1000000000000000000"));
    w.add_account(bob, Amount("1000000000000000000"));
    w.mint(token, alice, 1000);
    w.mint(lenient, alice, 1000);
    FlashLoanProvider p;
    p.address = lender;
    p.name = "lender-a";
    p.loan_selector = sel::flash_loan_a;
    p.fee_numerator = 9;
    p.fee_denominator = 10000;
    w.add_provider(p);
    w.mint(token, lender, 1'000'000);
    scenarios::install_executor(w, borrower, alice, "borrower");
    w.snapshot_provider_liquidity();
  }

  Transaction call(const Address& from, std::uint64_t nonce, const Address& to, calldata::CallData cd,
                   Gas limit = 1'000'000, std::uint64_t price = 1) {
    return make_transaction(from, nonce, to, price, limit, calldata::encode_call(cd));
  }

  Transaction loan(const Amount& amount, const Amount& repay) {
    calldata::CallData lend{sel::flash_loan_a, {borrower.to_word(), token.to_word(), amount_to_word(amount), token.to_word()},
                            {{sel::transfer, {lender.to_word(), amount_to_word(repay)}, {}}}};
    return call(alice, 0, borrower, {sel::execute, {lender.to_word()}, {lend}});
  }
};

}  // namespace

TEST(Executor, TokenTransferMovesBalance) {
  Fixture f;
  auto tx = f.call(f.alice, 0, f.token, {sel::transfer, {f.bob.to_word(), amount_to_word(400)}, {}});
  auto r = apply_transaction(f.w, tx);
  ASSERT_EQ(r.trace.status, TxStatus::Success);
  EXPECT_EQ(r.world.balance_of(f.token, f.alice), 600);
  EXPECT_EQ(r.world.balance_of(f.token, f.bob), 400);
  ASSERT_EQ(r.trace.money_flows.size(), 1u);
  EXPECT_EQ(r.trace.money_flows[0].amount, 400);
  EXPECT_TRUE(supply_consistent(r.world));
}

TEST(Executor, InsufficientBalanceRevertsWithoutChange) {
  Fixture f;
  auto tx = f.call(f.alice, 0, f.token, {sel::transfer, {f.bob.to_word(), amount_to_word(1001)}, {}});
  auto r = apply_transaction(f.w, tx);
  EXPECT_EQ(r.trace.status, TxStatus::Reverted);
  EXPECT_EQ(r.trace.revert_reason, "InsufficientBalance");
  EXPECT_EQ(r.world, f.w);
}

TEST(Executor, LenientTokenReturnsFalse) {
  Fixture f;
  auto tx = f.call(f.alice, 0, f.lenient, {sel::transfer, {f.bob.to_word(), amount_to_word(5000)}, {}});
  auto r = apply_transaction(f.w, tx);
  EXPECT_EQ(r.trace.status, TxStatus::Success);
  EXPECT_EQ(r.world.balance_of(f.lenient, f.bob), 0);
}

TEST(Executor, TransferFromConsumesAllowance) {
  Fixture f;
  f.w.set_allowance(f.token, f.alice, f.bob, 300);
  auto tx = f.call(f.bob, 0, f.token, {sel::transfer_from, {f.alice.to_word(), f.bob.to_word(), amount_to_word(200)}, {}});
  auto r = apply_transaction(f.w, tx);
  ASSERT_EQ(r.trace.status, TxStatus::Success);
  EXPECT_EQ(r.world.tokens.at(f.token).allowance(f.alice, f.bob), 100);
  auto again = f.call(f.bob, 0, f.token, {sel::transfer_from, {f.alice.to_word(), f.bob.to_word(), amount_to_word(200)}, {}});
  EXPECT_EQ(apply_transaction(r.world, again).trace.revert_reason, "InsufficientAllowance");
}

TEST(Executor, FlashLoanRepaidWithFee) {
  Fixture f;
  f.w.mint(f.token, f.borrower, 1000);
  auto r = apply_transaction(f.w, f.loan(100'000, 100'090));
  ASSERT_EQ(r.trace.status, TxStatus::Success) << r.trace.revert_reason;
  EXPECT_EQ(r.world.balance_of(f.token, f.lender), 1'000'090);
  EXPECT_TRUE(providers_solvent(r.world));
}

TEST(Executor, FlashLoanFeeRoundsUp) {
  FlashLoanProvider p;
  p.fee_numerator = 9;
  p.fee_denominator = 10000;
  EXPECT_EQ(p.fee_for(1), 1);
  EXPECT_EQ(p.fee_for(10000), 9);
  EXPECT_EQ(p.fee_for(10001), 10);
}

TEST(Executor, UnrepaidFlashLoanReverts) {
  Fixture f;
  auto r = apply_transaction(f.w, f.loan(100'000, 100'000));
  EXPECT_EQ(r.trace.status, TxStatus::Reverted);
  EXPECT_EQ(r.trace.revert_reason, "flash loan not repaid");
  EXPECT_EQ(r.world, f.w);
}

TEST(Executor, LoanBeyondLiquidityReverts) {
  Fixture f;
  EXPECT_EQ(apply_transaction(f.w, f.loan(2'000'000, 2'000'000)).trace.revert_reason, "InsufficientLiquidity");
}

TEST(Executor, OutOfGas) {
  Fixture f;
  auto tx = f.call(f.alice, 0, f.token, {sel::transfer, {f.bob.to_word(), amount_to_word(1)}, {}}, 30'000);
  auto r = apply_transaction(f.w, tx);
  EXPECT_EQ(r.trace.status, TxStatus::OutOfGas);
  EXPECT_EQ(r.trace.gas_used, 30'000u);
  EXPECT_EQ(r.world, f.w);
}

TEST(Executor, PreconditionErrors) {
  Fixture f;
  auto unknown = make_transaction(f.alice, 0, Address::from_label("nobody"), 1, 21000, {});
  EXPECT_THROW(apply_transaction(f.w, unknown), Error);
  auto bad_nonce = make_transaction(f.alice, 3, f.bob, 1, 21000, {});
  try {
    apply_transaction(f.w, bad_nonce);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadNonce);
  }
  EXPECT_NO_THROW(simulate_transaction(f.w, bad_nonce));
}

TEST(Executor, SettlementChargesGasAndBumpsNonce) {
  Fixture f;
  auto tx = make_transaction(f.alice, 0, f.bob, 2, 21000, {});
  WorldState w = f.w;
  auto trace = apply_transaction_in_place(w, tx);
  settle_transaction(w, tx, trace);
  EXPECT_EQ(w.nonce_of(f.alice), 1u);
  EXPECT_EQ(w.native_of(f.alice), Amount("1000000000000000000") - 42000);
}

TEST(Executor, CommittedReadsAreConsistentWithinTransaction) {
  // A balanceOf after a transfer inside the same transaction sees the new value.
  Fixture f;
  f.w.mint(f.token, f.borrower, 1000);
  calldata::CallData lend{sel::flash_loan_a,
                          {f.borrower.to_word(), f.token.to_word(), amount_to_word(10), f.token.to_word(), f.token.to_word()},
                          {{sel::transfer, {f.lender.to_word(), amount_to_word(11)}, {}},
                           {sel::balance_of, {f.lender.to_word()}, {}}}};
  auto tx = f.call(f.alice, 0, f.borrower, {sel::execute, {f.lender.to_word()}, {lend}});
  auto r = apply_transaction(f.w, tx);
  ASSERT_EQ(r.trace.status, TxStatus::Success) << r.trace.revert_reason;
  EXPECT_EQ(r.trace.internal_calls.size(), 6u);
}

TEST(Atomicity, EveryInjectedFailureLeavesWorldUntouched) {
  auto spec = scenarios::build_hedgey_scenario();
  const auto& tx = spec.attack()->tx;
  auto clean = simulate_transaction(spec.genesis, tx);
  ASSERT_EQ(clean.status, TxStatus::Success);
  ASSERT_GT(clean.failure_points, 10u);
  for (std::size_t p = 0; p < clean.failure_points; ++p) {
    for (auto kind : {FailureInjection::Kind::GuardFailure, FailureInjection::Kind::GasExhaustion}) {
      ExecOptions o;
      o.inject = FailureInjection{p, kind};
      auto r = apply_transaction(spec.genesis, tx, {}, o);
      EXPECT_NE(r.trace.status, TxStatus::Success);
      EXPECT_EQ(r.world, spec.genesis) << "point " << p;
    }
  }
}

TEST(BlockBuilder, RelayLaneFirstThenPriceOrder) {
  Fixture f;
  auto low = make_transaction(f.alice, 0, f.bob, 5, 21000, {});
  auto high = make_transaction(f.bob, 0, f.alice, 50, 21000, {});
  auto relay = make_transaction(f.bob, 1, f.alice, 1, 21000, {});
  auto res = build_block(f.w, {{low, 0}, {high, 1}}, {});
  ASSERT_EQ(res.block.transactions.size(), 2u);
  EXPECT_EQ(res.block.transactions[0].hash, high.hash);
  EXPECT_TRUE(block_ordering_ok(res.block));

  auto first = make_transaction(f.bob, 0, f.alice, 1, 21000, {});
  auto res2 = build_block(f.w, {{low, 0}, {relay, 1}}, {first});
  ASSERT_EQ(res2.block.transactions.size(), 3u);
  EXPECT_EQ(res2.block.lanes[0], Lane::Relay);
  EXPECT_EQ(res2.block.transactions[0].hash, first.hash);
  EXPECT_TRUE(block_ordering_ok(res2.block));
  EXPECT_EQ(res2.world.block_height, 1u);
}

TEST(BlockBuilder, FutureNoncesDeferAndStaleNoncesDrop) {
  Fixture f;
  auto future = make_transaction(f.alice, 1, f.bob, 9, 21000, {});
  auto stale = make_transaction(f.bob, 0, f.alice, 1, 21000, {});
  WorldState w = f.w;
  w.accounts[f.bob].nonce = 1;
  auto res = build_block(w, {{future, 0}, {stale, 1}}, {});
  EXPECT_TRUE(res.block.transactions.empty());
  EXPECT_EQ(res.deferred, std::vector<Hash32>{future.hash});
  EXPECT_EQ(res.dropped, std::vector<Hash32>{stale.hash});
}

TEST(BlockBuilder, SameSenderChainsWithinBlock) {
  Fixture f;
  auto n0 = make_transaction(f.alice, 0, f.bob, 9, 21000, {});
  auto n1 = make_transaction(f.alice, 1, f.bob, 1, 21000, {});
  auto res = build_block(f.w, {{n1, 0}, {n0, 1}}, {});
  EXPECT_EQ(res.block.transactions.size(), 2u);
  EXPECT_EQ(res.world.nonce_of(f.alice), 2u);
}

TEST(BlockBuilder, HigherPricedSuccessorWaitsForNextBlock) {
  Fixture f;
  auto n0 = make_transaction(f.alice, 0, f.bob, 1, 21000, {});
  auto n1 = make_transaction(f.alice, 1, f.bob, 9, 21000, {});
  auto res = build_block(f.w, {{n1, 0}, {n0, 1}}, {});
  ASSERT_EQ(res.block.transactions.size(), 1u);
  EXPECT_EQ(res.deferred, std::vector<Hash32>{n1.hash});
  auto next = build_block(res.world, {{n1, 0}}, {});
  EXPECT_EQ(next.block.transactions.size(), 1u);
}

TEST(BlockBuilder, CapacityDefersOverflow) {
  Fixture f;
  std::vector<PoolCandidate> pool;
  for (std::uint64_t i = 0; i < 5; ++i) pool.push_back({make_transaction(f.alice, i, f.bob, 1, 21000, {}), i});
  BuildOptions o;
  o.capacity = 3;
  auto res = build_block(f.w, pool, {}, o);
  EXPECT_EQ(res.block.transactions.size(), 3u);
  EXPECT_EQ(res.deferred.size(), 2u);
  o.capacity = 0;
  EXPECT_THROW(build_block(f.w, pool, {}, o), Error);
}

TEST(BlockBuilder, RevertedTransactionStillPaysAndIsIncluded) {
  Fixture f;
  auto tx = make_transaction(f.alice, 0, f.token, 1, 100000,
                             calldata::encode_call({sel::transfer, {f.bob.to_word(), amount_to_word(5000)}, {}}));
  auto res = build_block(f.w, {{tx, 0}}, {});
  ASSERT_EQ(res.block.traces.size(), 1u);
  EXPECT_EQ(res.block.traces[0].status, TxStatus::Reverted);
  EXPECT_EQ(res.world.nonce_of(f.alice), 1u);
  EXPECT_EQ(res.world.balance_of(f.token, f.alice), 1000);
}
