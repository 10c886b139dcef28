#include "flashguard/detector.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace flashguard::detector {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void collect_known(const calldata::CallData& call, const SignatureDatabase& db, std::set<Selector>& out) {
  if (db.contains(call.selector)) out.insert(call.selector);
  for (const auto& child : call.nested) collect_known(child, db, out);
}

// Full decode of the input, the expensive path the prefilter exists to avoid.
// Input that does not decode falls back to a tolerant scan.
std::set<Selector> decode_selectors(const Bytes& input, const SignatureDatabase& db) {
  std::set<Selector> out;
  if (input.size() < 4) return out;
  try {
    collect_known(calldata::decode_call(input), db, out);
  } catch (const Error&) {
    out = calldata::scan_embedded_selectors(input, db);
  }
  return out;
}

}  // namespace

void ExclusionList::add(const Address& a, std::string reason) { reasons_[a] = std::move(reason); }

ExclusionList ExclusionList::parse(std::istream& in) {
  ExclusionList out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto comma = line.find(',');
    try {
      out.add(Address::from_hex(line.substr(0, comma)), comma == std::string::npos ? "" : line.substr(comma + 1));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::ParseError, "exclusion line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

ExclusionList ExclusionList::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open exclusion list " + path);
  return parse(in);
}

void ExclusionList::write(std::ostream& out) const {
  for (const auto& [a, reason] : reasons_) out << a.hex() << ',' << reason << '\n';
}

ClassFlags flags_for(const std::set<Selector>& selectors, const SignatureDatabase& db) {
  ClassFlags f;
  for (const auto& s : selectors) {
    auto c = db.classify(s);
    if (!c) continue;
    switch (*c) {
      case calldata::SignatureClass::FlashLoan: f.flash_loan = true; break;
      case calldata::SignatureClass::Transfer: f.transfer = true; break;
      case calldata::SignatureClass::Approval: f.approval = true; break;
      case calldata::SignatureClass::Withdrawal: f.withdrawal = true; break;
    }
  }
  return f;
}

bool qualify(const ClassFlags& f, const QualifyPolicy& policy) {
  return f.flash_loan && (f.transfer || f.withdrawal) && (f.approval || !policy.require_approval);
}

const char* to_string(Mode m) { return m == Mode::Scan ? "scan" : "trace"; }

bool prefilter(const Transaction& tx, const SignatureDatabase& db, const ExclusionList& exclusions) {
  if (exclusions.contains(tx.from) || exclusions.contains(tx.to)) return false;
  if (tx.input.size() < 4) return false;
  Selector head{{tx.input[0], tx.input[1], tx.input[2], tx.input[3]}};
  if (db.contains(head)) return true;
  // Forwarder contracts hide the interesting calls behind an unknown head selector.
  for (std::size_t pos = 4; pos + 32 <= tx.input.size(); pos += 32)
    if (calldata::is_nested_tag(std::span(tx.input).subspan(pos, 32))) return true;
  return false;
}

DetectionVerdict classify(const Transaction& tx, const SignatureDatabase& db, const ExclusionList& exclusions,
                          Mode mode, const chainsim::WorldState* world, const QualifyPolicy& policy,
                          const chainsim::GasSchedule& gas) {
  DetectionVerdict v;
  v.tx_hash = tx.hash;
  if (exclusions.contains(tx.from) || exclusions.contains(tx.to)) {
    v.skipped = true;
    return v;
  }
  std::set<Selector> found;
  if (mode == Mode::Scan) {
    found = decode_selectors(tx.input, db);
  } else {
    if (!world) throw Error(ErrorCode::ConfigError, "trace mode requires a world snapshot");
    try {
      for (const auto& s : calldata::trace_selectors(*world, tx, gas))
        if (db.contains(s)) found.insert(s);
    } catch (const Error&) {
      // Unknown recipient: nothing to execute, no selectors.
    }
  }
  v.flags = flags_for(found, db);
  v.matched_selectors = std::move(found);
  v.flagged = qualify(v.flags, policy);
  return v;
}

Detector::Detector(std::shared_ptr<const SignatureDatabase> db, std::shared_ptr<const ExclusionList> exclusions,
                   DetectorConfig config)
    : db_(std::move(db)), exclusions_(std::move(exclusions)), config_(config) {}

std::optional<DetectionVerdict> Detector::on_event(const mempool::StreamEvent& ev, const chainsim::WorldState* world) {
  if (ev.kind != mempool::EventKind::Added) {
    transient_.erase(ev.tx_hash);
    return std::nullopt;
  }
  if (!ev.tx) return std::nullopt;
  auto t0 = Clock::now();
  DetectionVerdict v;
  if (config_.use_prefilter && !prefilter(*ev.tx, *db_, *exclusions_)) {
    v.tx_hash = ev.tx->hash;
    v.skipped = exclusions_->contains(ev.tx->from) || exclusions_->contains(ev.tx->to);
    v.prefiltered = true;
  } else {
    v = classify(*ev.tx, *db_, *exclusions_, config_.mode, world, config_.policy, config_.gas);
  }
  v.classify_ms = ms_since(t0);
  v.detection_latency_ms = ev.published_at == Clock::time_point{} ? v.classify_ms : ms_since(ev.published_at);

  if (transient_.size() >= config_.transient_capacity) {
    // Bounded: forget the oldest entries that are still tracked.
    while (!transient_order_.empty() && transient_.size() >= config_.transient_capacity) {
      transient_.erase(transient_order_.front());
      transient_order_.pop_front();
    }
  }
  transient_[v.tx_hash] = v.flagged;
  transient_order_.push_back(v.tx_hash);
  if (transient_order_.size() > 2 * config_.transient_capacity) {
    std::deque<Hash32> live;
    for (const auto& h : transient_order_)
      if (transient_.count(h)) live.push_back(h);
    transient_order_.swap(live);
  }
  ++emitted_;
  return v;
}

void run_detector(mempool::Subscription& events, Detector& detector, const VerdictSink& flagged,
                  const VerdictSink& all, const chainsim::WorldState* world) {
  while (auto ev = events.next()) {
    auto v = detector.on_event(*ev, world);
    if (!v) continue;
    if (v->flagged && flagged) flagged(*v, *ev->tx);
    if (all) all(*v, *ev->tx);
  }
}

}  // namespace flashguard::detector
