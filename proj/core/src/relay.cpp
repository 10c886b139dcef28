#include "flashguard/relay.hpp"

namespace flashguard::relay {

const char* to_string(Receipt r) {
  switch (r) {
    case Receipt::Accepted: return "Accepted";
    case Receipt::TooLate: return "TooLate";
    case Receipt::Duplicate: return "Duplicate";
  }
  return "?";
}

Receipt RelayQueue::submit_private(const Transaction& counter_tx, const Hash32& target, std::int64_t now_ms,
                                   const mempool::PendingPool& pool) {
  std::lock_guard lock(mu_);
  if (seen_.count({counter_tx.hash, target})) return Receipt::Duplicate;
  if (pool.state(target) != mempool::TxState::Pending) return Receipt::TooLate;
  seen_.insert({counter_tx.hash, target});
  accepted_.insert(counter_tx.hash);
  entries_.push_back({counter_tx, target, now_ms});
  return Receipt::Accepted;
}

Drain RelayQueue::drain_for_block(const mempool::PendingPool& pool) {
  std::lock_guard lock(mu_);
  Drain out;
  for (auto& e : entries_) {
    if (pool.state(e.target) == mempool::TxState::Pending) {
      out.lane.push_back(std::move(e.counter_tx));
    } else {
      discard_log_.push_back(e);
      out.discarded.push_back(std::move(e));
    }
  }
  entries_.clear();
  return out;
}

std::size_t RelayQueue::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

std::set<Hash32> RelayQueue::accepted_hashes() const {
  std::lock_guard lock(mu_);
  return accepted_;
}

}  // namespace flashguard::relay
