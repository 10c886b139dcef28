#include <algorithm>

#include "flashguard/chainsim/block.hpp"

namespace flashguard::chainsim {

namespace {

enum class Admission { Include, Drop, Defer };

Admission admit(const WorldState& world, const Transaction& tx, double fee_multiplier) {
  if (!world.exists(tx.to) || tx.gas_limit == 0) return Admission::Drop;
  std::uint64_t expected = world.nonce_of(tx.from);
  if (tx.nonce < expected) return Admission::Drop;
  if (tx.nonce > expected) return Admission::Defer;
  Amount max_fee = Amount(tx.gas_limit) * tx.gas_price;
  if (fee_multiplier != 1.0) max_fee = max_fee * static_cast<std::uint64_t>(fee_multiplier * 1000.0 + 0.5) / 1000;
  if (world.native_of(tx.from) < max_fee + tx.value) return Admission::Drop;
  return Admission::Include;
}

}  // namespace

BuildResult build_block(const WorldState& world, const std::vector<PoolCandidate>& pool,
                        const std::vector<Transaction>& relay_lane, const BuildOptions& options) {
  if (options.capacity < 1) throw Error(ErrorCode::ConfigError, "block capacity must be at least 1");
  BuildResult out{world, {}, {}, {}};
  out.block.height = world.block_height + 1;

  auto consider = [&](const Transaction& tx, Lane lane) {
    if (out.block.transactions.size() >= options.capacity) {
      out.deferred.push_back(tx.hash);
      return;
    }
    double mult = lane == Lane::Relay ? options.relay_fee_multiplier : 1.0;
    switch (admit(out.world, tx, mult)) {
      case Admission::Drop: out.dropped.push_back(tx.hash); return;
      case Admission::Defer: out.deferred.push_back(tx.hash); return;
      case Admission::Include: break;
    }
    ExecutionTrace trace = apply_transaction_in_place(out.world, tx, options.gas);
    settle_transaction(out.world, tx, trace, mult);
    out.block.transactions.push_back(tx);
    out.block.traces.push_back(std::move(trace));
    out.block.lanes.push_back(lane);
  };

  for (const auto& tx : relay_lane) consider(tx, Lane::Relay);

  std::vector<const PoolCandidate*> order;
  order.reserve(pool.size());
  for (const auto& c : pool) order.push_back(&c);
  std::stable_sort(order.begin(), order.end(), [](const PoolCandidate* a, const PoolCandidate* b) {
    if (a->tx.gas_price != b->tx.gas_price) return a->tx.gas_price > b->tx.gas_price;
    return a->arrival_seq < b->arrival_seq;
  });
  for (const auto* c : order) consider(c->tx, Lane::Pool);

  out.world.block_height = out.block.height;
  return out;
}

bool block_ordering_ok(const Block& block) {
  bool in_pool = false;
  std::uint64_t last_price = 0;
  for (std::size_t i = 0; i < block.transactions.size(); ++i) {
    if (block.lanes[i] == Lane::Relay) {
      if (in_pool) return false;
      continue;
    }
    std::uint64_t price = block.transactions[i].gas_price;
    if (in_pool && price > last_price) return false;
    in_pool = true;
    last_price = price;
  }
  return true;
}

}  // namespace flashguard::chainsim
