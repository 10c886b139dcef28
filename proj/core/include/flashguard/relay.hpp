#pragma once

#include <cstdint>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "flashguard/chainsim/execution.hpp"
#include "flashguard/mempool.hpp"

namespace flashguard::relay {

using chainsim::Transaction;

enum class Receipt : std::uint8_t { Accepted, TooLate, Duplicate };
const char* to_string(Receipt r);

struct RelayEntry {
  Transaction counter_tx;
  Hash32 target;
  std::int64_t submitted_at_ms = 0;
};

struct Drain {
  std::vector<Transaction> lane;
  std::vector<RelayEntry> discarded;  // target no longer pending
};

// Private lane to the block builder. Entries never touch the public pool.
class RelayQueue {
 public:
  // Accepted only while the target is pending in `pool`.
  Receipt submit_private(const Transaction& counter_tx, const Hash32& target, std::int64_t now_ms,
                         const mempool::PendingPool& pool);
  // Removes every queued entry; those with pending targets form the lane, FIFO.
  Drain drain_for_block(const mempool::PendingPool& pool);

  std::size_t size() const;
  // Every counter hash ever accepted, for invisibility checks.
  std::set<Hash32> accepted_hashes() const;
  const std::vector<RelayEntry>& discard_log() const { return discard_log_; }

 private:
  mutable std::mutex mu_;
  std::vector<RelayEntry> entries_;
  std::set<std::pair<Hash32, Hash32>> seen_;
  std::set<Hash32> accepted_;
  std::vector<RelayEntry> discard_log_;
};

}  // namespace flashguard::relay
