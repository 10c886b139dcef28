#include "flashguard/mempool.hpp"

#include <algorithm>
#include <limits>

namespace flashguard::mempool {

namespace {

std::pair<std::uint64_t, std::uint64_t> priority_key(const Transaction& tx, std::uint64_t seq) {
  return {std::numeric_limits<std::uint64_t>::max() - tx.gas_price, seq};
}

}  // namespace

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Added: return "Added";
    case EventKind::Dropped: return "Dropped";
    case EventKind::Confirmed: return "Confirmed";
  }
  return "?";
}

void Subscription::push(StreamEvent ev) {
  std::unique_lock lock(mu_);
  not_full_.wait(lock, [&] { return closed_ || queue_.size() < capacity_; });
  if (closed_) return;
  queue_.push_back(std::move(ev));
  not_empty_.notify_one();
}

std::optional<StreamEvent> Subscription::next() {
  std::unique_lock lock(mu_);
  not_empty_.wait(lock, [&] { return closed_ || !queue_.empty(); });
  if (queue_.empty()) return std::nullopt;
  StreamEvent ev = std::move(queue_.front());
  queue_.pop_front();
  not_full_.notify_one();
  return ev;
}

std::optional<StreamEvent> Subscription::try_next() {
  std::lock_guard lock(mu_);
  if (queue_.empty()) return std::nullopt;
  StreamEvent ev = std::move(queue_.front());
  queue_.pop_front();
  not_full_.notify_one();
  return ev;
}

std::size_t Subscription::buffered() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

void Subscription::close() {
  std::lock_guard lock(mu_);
  closed_ = true;
  not_empty_.notify_all();
  not_full_.notify_all();
}

bool Subscription::closed() const {
  std::lock_guard lock(mu_);
  return closed_;
}

PendingPool::~PendingPool() { close(); }

StreamEvent PendingPool::make_event(EventKind kind, const Hash32& hash, std::int64_t now_ms,
                                    std::shared_ptr<const Transaction> tx) {
  StreamEvent ev;
  ev.kind = kind;
  ev.tx_hash = hash;
  last_timestamp_ = std::max(last_timestamp_, now_ms);
  ev.timestamp_ms = last_timestamp_;
  ev.sequence = next_event_++;
  ev.tx = std::move(tx);
  return ev;
}

void PendingPool::publish(const StreamEvent& ev) {
  std::vector<std::shared_ptr<Subscription>> subs;
  {
    std::lock_guard lock(subs_mu_);
    subs = subscribers_;
  }
  StreamEvent out = ev;
  out.published_at = std::chrono::steady_clock::now();
  for (auto& s : subs) s->push(out);
}

StreamEvent PendingPool::submit(Transaction tx, std::int64_t now_ms) {
  // publish_mu_ serializes publication so every subscriber sees one total order.
  std::lock_guard pub(publish_mu_);
  StreamEvent ev;
  {
    std::lock_guard lock(mu_);
    if (by_hash_.count(tx.hash) || confirmed_.count(tx.hash) || dropped_.count(tx.hash))
      throw Error(ErrorCode::DuplicateHash, tx.hash.hex());
    auto shared = std::make_shared<const Transaction>(std::move(tx));
    std::uint64_t seq = next_seq_++;
    ev = make_event(EventKind::Added, shared->hash, now_ms, shared);
    by_hash_.emplace(shared->hash, PendingEntry{shared, ev.timestamp_ms, seq});
    priority_.emplace(priority_key(*shared, seq), shared->hash);
  }
  publish(ev);
  return ev;
}

std::shared_ptr<Subscription> PendingPool::subscribe() {
  std::lock_guard pub(publish_mu_);
  auto s = std::make_shared<Subscription>(subscriber_capacity_);
  std::lock_guard lock(subs_mu_);
  subscribers_.push_back(s);
  return s;
}

std::vector<StreamEvent> PendingPool::on_block(const chainsim::Block& block, std::int64_t now_ms) {
  std::lock_guard pub(publish_mu_);
  std::vector<StreamEvent> events;
  {
    std::lock_guard lock(mu_);
    for (const auto& tx : block.transactions) {
      auto it = by_hash_.find(tx.hash);
      if (it == by_hash_.end()) continue;
      priority_.erase(priority_.find(priority_key(*it->second.tx, it->second.arrival_seq)));
      by_hash_.erase(it);
      confirmed_.insert(tx.hash);
      events.push_back(make_event(EventKind::Confirmed, tx.hash, now_ms, nullptr));
    }
  }
  for (const auto& ev : events) publish(ev);
  return events;
}

std::optional<StreamEvent> PendingPool::drop(const Hash32& hash, std::int64_t now_ms) {
  std::lock_guard pub(publish_mu_);
  StreamEvent ev;
  {
    std::lock_guard lock(mu_);
    auto it = by_hash_.find(hash);
    if (it == by_hash_.end()) return std::nullopt;
    priority_.erase(priority_.find(priority_key(*it->second.tx, it->second.arrival_seq)));
    by_hash_.erase(it);
    dropped_.insert(hash);
    ev = make_event(EventKind::Dropped, hash, now_ms, nullptr);
  }
  publish(ev);
  return ev;
}

void PendingPool::close() {
  std::lock_guard lock(subs_mu_);
  for (auto& s : subscribers_) s->close();
}

bool PendingPool::contains(const Hash32& hash) const {
  std::lock_guard lock(mu_);
  return by_hash_.count(hash) != 0;
}

TxState PendingPool::state(const Hash32& hash) const {
  std::lock_guard lock(mu_);
  if (by_hash_.count(hash)) return TxState::Pending;
  if (confirmed_.count(hash)) return TxState::Confirmed;
  if (dropped_.count(hash)) return TxState::Dropped;
  return TxState::Unknown;
}

std::shared_ptr<const Transaction> PendingPool::get(const Hash32& hash) const {
  std::lock_guard lock(mu_);
  auto it = by_hash_.find(hash);
  return it == by_hash_.end() ? nullptr : it->second.tx;
}

std::size_t PendingPool::size() const {
  std::lock_guard lock(mu_);
  return by_hash_.size();
}

std::vector<PendingEntry> PendingPool::snapshot() const {
  std::lock_guard lock(mu_);
  std::vector<PendingEntry> out;
  out.reserve(by_hash_.size());
  for (const auto& [h, e] : by_hash_) out.push_back(e);
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.arrival_seq < b.arrival_seq; });
  return out;
}

std::vector<PendingEntry> PendingPool::by_priority() const {
  std::lock_guard lock(mu_);
  std::vector<PendingEntry> out;
  out.reserve(priority_.size());
  for (const auto& [key, h] : priority_) out.push_back(by_hash_.at(h));
  return out;
}

std::vector<chainsim::PoolCandidate> PendingPool::candidates() const {
  auto entries = snapshot();
  std::vector<chainsim::PoolCandidate> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back({*e.tx, e.arrival_seq});
  return out;
}

}  // namespace flashguard::mempool
