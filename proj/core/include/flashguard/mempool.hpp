#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "flashguard/chainsim/block.hpp"
#include "flashguard/chainsim/execution.hpp"

namespace flashguard::mempool {

using chainsim::Transaction;

enum class EventKind : std::uint8_t { Added, Dropped, Confirmed };
const char* to_string(EventKind k);

struct StreamEvent {
  EventKind kind = EventKind::Added;
  Hash32 tx_hash;
  std::int64_t timestamp_ms = 0;  // virtual clock, monotone per pool
  std::uint64_t sequence = 0;
  std::chrono::steady_clock::time_point published_at{};
  std::shared_ptr<const Transaction> tx;  // set for Added
};

// Bounded per-subscriber FIFO. A full buffer blocks the publisher.
class Subscription {
 public:
  explicit Subscription(std::size_t capacity) : capacity_(capacity) {}

  // Blocks until an event arrives or the subscription is closed.
  std::optional<StreamEvent> next();
  std::optional<StreamEvent> try_next();
  std::size_t buffered() const;
  std::size_t capacity() const { return capacity_; }
  void close();
  bool closed() const;

 private:
  friend class PendingPool;
  void push(StreamEvent ev);

  const std::size_t capacity_;
  mutable std::mutex mu_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<StreamEvent> queue_;
  bool closed_ = false;
};

enum class TxState : std::uint8_t { Unknown, Pending, Confirmed, Dropped };

struct PendingEntry {
  std::shared_ptr<const Transaction> tx;
  std::int64_t arrival_ms = 0;
  std::uint64_t arrival_seq = 0;
};

class PendingPool {
 public:
  explicit PendingPool(std::size_t subscriber_capacity = 1 << 16) : subscriber_capacity_(subscriber_capacity) {}
  ~PendingPool();

  StreamEvent submit(Transaction tx, std::int64_t now_ms);
  std::shared_ptr<Subscription> subscribe();
  std::vector<StreamEvent> on_block(const chainsim::Block& block, std::int64_t now_ms);
  std::optional<StreamEvent> drop(const Hash32& hash, std::int64_t now_ms);
  void close();

  bool contains(const Hash32& hash) const;
  TxState state(const Hash32& hash) const;
  std::shared_ptr<const Transaction> get(const Hash32& hash) const;
  std::size_t size() const;
  // Arrival order.
  std::vector<PendingEntry> snapshot() const;
  // Descending gas price, FIFO among equal prices.
  std::vector<PendingEntry> by_priority() const;
  std::vector<chainsim::PoolCandidate> candidates() const;

 private:
  StreamEvent make_event(EventKind kind, const Hash32& hash, std::int64_t now_ms,
                         std::shared_ptr<const Transaction> tx);
  void publish(const StreamEvent& ev);

  const std::size_t subscriber_capacity_;
  mutable std::mutex mu_;
  std::unordered_map<Hash32, PendingEntry> by_hash_;
  std::multimap<std::pair<std::uint64_t, std::uint64_t>, Hash32> priority_;  // (-price, seq) via inverted key
  std::unordered_set<Hash32> confirmed_;
  std::unordered_set<Hash32> dropped_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t next_event_ = 0;
  std::int64_t last_timestamp_ = 0;

  std::mutex publish_mu_;
  std::mutex subs_mu_;
  std::vector<std::shared_ptr<Subscription>> subscribers_;
};

}  // namespace flashguard::mempool
