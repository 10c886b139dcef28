#pragma once

#include <cstdint>
#include <vector>

#include "flashguard/chainsim/execution.hpp"
#include "flashguard/chainsim/world.hpp"

namespace flashguard::chainsim {

enum class Lane : std::uint8_t { Relay, Pool };

struct Block {
  std::uint64_t height = 0;
  std::vector<Transaction> transactions;
  std::vector<ExecutionTrace> traces;
  std::vector<Lane> lanes;

  bool operator==(const Block&) const = default;
};

struct PoolCandidate {
  Transaction tx;
  std::uint64_t arrival_seq = 0;  // breaks gas-price ties, earlier first
};

struct BuildOptions {
  std::size_t capacity = 256;
  GasSchedule gas{};
  double relay_fee_multiplier = 1.0;
};

struct BuildResult {
  WorldState world;
  Block block;
  std::vector<Hash32> dropped;   // invalid: stale nonce, unknown recipient, unaffordable
  std::vector<Hash32> deferred;  // future nonce or over capacity; stays pending
};

// Relay lane first in FIFO order, then pool candidates by descending gas price.
BuildResult build_block(const WorldState& world, const std::vector<PoolCandidate>& pool,
                        const std::vector<Transaction>& relay_lane, const BuildOptions& options = {});

// Relay lane precedes pool, pool segment has non-increasing gas price.
bool block_ordering_ok(const Block& block);

}  // namespace flashguard::chainsim
