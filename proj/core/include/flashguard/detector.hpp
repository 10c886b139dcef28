#pragma once

#include <chrono>
#include <deque>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <unordered_map>

#include "flashguard/address.hpp"
#include "flashguard/calldata.hpp"
#include "flashguard/chainsim/execution.hpp"
#include "flashguard/mempool.hpp"

namespace flashguard::detector {

using calldata::Selector;
using calldata::SignatureDatabase;
using chainsim::Transaction;

class ExclusionList {
 public:
  void add(const Address& a, std::string reason);
  bool contains(const Address& a) const { return reasons_.count(a) != 0; }
  const std::map<Address, std::string>& entries() const { return reasons_; }
  std::size_t size() const { return reasons_.size(); }

  // Line format: address_hex,reason
  static ExclusionList parse(std::istream& in);
  static ExclusionList load(const std::string& path);
  void write(std::ostream& out) const;

 private:
  std::map<Address, std::string> reasons_;
};

struct ClassFlags {
  bool flash_loan = false;
  bool transfer = false;
  bool withdrawal = false;
  bool approval = false;

  bool operator==(const ClassFlags&) const = default;
};

ClassFlags flags_for(const std::set<Selector>& selectors, const SignatureDatabase& db);

// Qualification rule. Approval is mandatory by default; the switch exists for experiments.
struct QualifyPolicy {
  bool require_approval = true;
};

bool qualify(const ClassFlags& flags, const QualifyPolicy& policy = {});

enum class Mode : std::uint8_t { Scan, Trace };
const char* to_string(Mode m);

struct DetectionVerdict {
  Hash32 tx_hash;
  ClassFlags flags;
  bool flagged = false;
  bool skipped = false;       // sender or recipient excluded
  bool prefiltered = false;   // screened out before full analysis
  std::set<Selector> matched_selectors;
  double detection_latency_ms = 0;  // monotonic: Added event publication to verdict
  double classify_ms = 0;           // classification work alone
};

struct DetectorConfig {
  Mode mode = Mode::Scan;
  bool use_prefilter = true;
  QualifyPolicy policy{};
  chainsim::GasSchedule gas{};
  std::size_t transient_capacity = 1 << 16;
};

// Cheap screen: false for excluded parties, empty input, or an unknown head selector
// with no nested blobs behind it.
bool prefilter(const Transaction& tx, const SignatureDatabase& db, const ExclusionList& exclusions);

// Trace mode needs a world snapshot; Scan mode ignores it.
DetectionVerdict classify(const Transaction& tx, const SignatureDatabase& db, const ExclusionList& exclusions,
                          Mode mode, const chainsim::WorldState* world = nullptr,
                          const QualifyPolicy& policy = {}, const chainsim::GasSchedule& gas = {});

class Detector {
 public:
  Detector(std::shared_ptr<const SignatureDatabase> db, std::shared_ptr<const ExclusionList> exclusions,
           DetectorConfig config = {});

  // Returns a verdict for Added events. Confirmed and Dropped evict transient state.
  std::optional<DetectionVerdict> on_event(const mempool::StreamEvent& ev,
                                           const chainsim::WorldState* world = nullptr);

  const DetectorConfig& config() const { return config_; }
  std::size_t transient_size() const { return transient_.size(); }
  std::size_t verdicts_emitted() const { return emitted_; }

 private:
  std::shared_ptr<const SignatureDatabase> db_;
  std::shared_ptr<const ExclusionList> exclusions_;
  DetectorConfig config_;
  std::unordered_map<Hash32, bool> transient_;
  std::deque<Hash32> transient_order_;
  std::size_t emitted_ = 0;
};

using VerdictSink = std::function<void(const DetectionVerdict&, const Transaction&)>;

// Consumes the subscription until it is closed. Every verdict reaches `all`;
// flagged verdicts also reach `flagged` immediately.
void run_detector(mempool::Subscription& events, Detector& detector, const VerdictSink& flagged,
                  const VerdictSink& all = {}, const chainsim::WorldState* world = nullptr);

}  // namespace flashguard::detector
