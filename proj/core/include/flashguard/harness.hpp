#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "flashguard/detector.hpp"
#include "flashguard/disruptor.hpp"
#include "flashguard/scenarios.hpp"

namespace flashguard::harness {

using scenarios::ScenarioSpec;

enum class RunMode : std::uint8_t { Baseline, DetectOnly, DetectAndDisrupt };
const char* to_string(RunMode m);
// Accepts baseline, detect and disrupt.
RunMode parse_run_mode(std::string_view text);

struct RunConfig {
  std::vector<std::string> scenario_paths;
  RunMode mode = RunMode::DetectAndDisrupt;
  detector::Mode detector_mode = detector::Mode::Scan;
  std::int64_t block_interval_ms = 12000;  // 0 selects the scenario's chain profile
  std::int64_t sealing_grace_ms = 2000;    // the builder snapshots this long before sealing
  std::uint64_t seed = 1;
  std::string report_path;
  std::string csv_path;
  // Signature database file; empty selects the built-in table.
  std::string signatures_path;
  // Virtual-time injections.
  std::int64_t detector_cost_ms = 0;
  std::int64_t verdict_delay_ms = 0;
  std::int64_t relay_latency_ms = 0;
  // Adds the measured detection latency to the virtual verdict time.
  bool wall_clock = false;
  bool prefilter = true;
  std::size_t max_blocks = 64;

  // Throws Error(ConfigError).
  void validate(std::int64_t interval_ms) const;
};

struct RelayStats {
  std::size_t accepted = 0;
  std::size_t too_late = 0;
  std::size_t duplicate = 0;
  std::size_t order_violations = 0;  // accepted counter not strictly ahead of its target
  std::size_t leaks = 0;             // relay hashes seen by a mempool subscriber

  bool operator==(const RelayStats&) const = default;
};

struct ScenarioRecord {
  std::string name;
  std::string chain;
  RunMode mode = RunMode::DetectAndDisrupt;
  std::optional<disruptor::DisruptionMode> disruption_mode;
  bool detected = false;
  bool disrupted = false;
  std::string attack_status;  // Success, Reverted, OutOfGas, NotIncluded
  std::optional<std::uint64_t> attack_block;
  Amount loss{};
  Amount baseline_loss{};
  Amount rescued{};
  Amount attacker_gain{};
  Gas counter_gas_used = 0;
  Amount dust_spent{};
  bool provider_liquidity_unchanged = true;
  bool providers_solvent = true;
  std::size_t blocks = 0;
  std::size_t benign_total = 0;
  std::size_t benign_flagged = 0;
  std::optional<scenarios::ShapeCounts> shape;
  bool shape_matches = true;
  RelayStats relay;
  std::string miss_reason;
  std::vector<std::string> mismatches;
  std::int64_t verdict_at_ms = -1;  // virtual
  std::int64_t seal_at_ms = -1;     // virtual sealing time of the attack's target block
  // Wall-clock measurements, excluded from determinism checks.
  double detection_latency_ms = 0;
  double classify_ms = 0;
  double disruption_latency_ms = 0;
};

struct Aggregate {
  std::size_t scenarios = 0;
  std::size_t detected = 0;
  std::size_t disrupted = 0;
  std::size_t mismatched = 0;
  Amount total_loss{};
  Amount total_baseline_loss{};
  Amount total_rescued{};
  Amount total_dust{};
  std::size_t benign_total = 0;
  std::size_t benign_flagged = 0;
  double fpr = 0;
  double accuracy = 0;
  double mean_detection_latency_ms = 0;
  double p50_detection_latency_ms = 0;
  double p99_detection_latency_ms = 0;
  double mean_disruption_latency_ms = 0;
};

struct MetricsReport {
  RunConfig config;
  std::vector<ScenarioRecord> scenarios;
  Aggregate aggregate;
};

// Simulates one scenario on the virtual clock. Non-baseline modes also run the baseline to
// compute rescued value.
ScenarioRecord run_scenario(const ScenarioSpec& spec, const RunConfig& config);
MetricsReport run(const std::vector<ScenarioSpec>& specs, const RunConfig& config);
// Paths are scenario JSON files or builtin:hedgey, builtin:presets, builtin:unseen, builtin:<preset>.
std::vector<ScenarioSpec> load_scenarios(const std::vector<std::string>& paths, std::uint64_t seed);
// Loads config.scenario_paths, runs and writes the configured report files.
MetricsReport run(const RunConfig& config);
// 0 when every scenario matched its expected outcome, 1 otherwise.
int exit_code(const MetricsReport& report);

std::string report_json(const MetricsReport& report);
std::string report_csv(const MetricsReport& report);
// Removes every "timing" member so reports can be compared byte for byte.
std::string strip_timing(const std::string& report_json);
void write_report(const MetricsReport& report);

// ---- false-positive evaluation ----

enum class ExclusionPolicy : std::uint8_t { None, KnownBots, AllBots };

struct FprConfig {
  std::vector<scenarios::TrafficProfile> profiles = scenarios::default_profiles();
  std::size_t count_per_profile = 20000;
  std::uint64_t seed = 1;
  ExclusionPolicy exclusions = ExclusionPolicy::KnownBots;
  detector::Mode mode = detector::Mode::Scan;
};

// Corpus config JSON: {"seed": n, "count_per_profile": n, "exclusions": "none|known|all",
// "detector": "scan|trace", "profiles": ["ethereum", ...] or [{"name": ..., "unknown_bot_ppm": ...}]}
FprConfig parse_corpus_config(std::string_view text, const std::string& source = "<corpus>");
FprConfig load_corpus_config(const std::string& path);

struct FprProfileRecord {
  std::string name;
  std::size_t total = 0;
  std::size_t flagged = 0;
  std::size_t unknown_bots = 0;          // designed false positives in the corpus
  std::size_t flagged_unexpected = 0;    // flagged transactions that are not unknown bots
  double fpr = 0;
  double accuracy = 0;
};

struct FprRecord {
  std::vector<FprProfileRecord> profiles;
  std::size_t total = 0;
  std::size_t flagged = 0;
  double fpr = 0;
  double accuracy = 0;
};

FprRecord evaluate_fpr(const FprConfig& config);
// Every transaction in the corpus is benign ground truth.
FprProfileRecord evaluate_corpus(const ScenarioSpec& corpus, detector::Mode mode);
std::string fpr_json(const FprRecord& record);

// Builds one corpus per configured profile.
std::vector<ScenarioSpec> build_corpora(const FprConfig& config);

// ---- latency and prefilter benchmarks ----

struct LatencyStats {
  std::size_t count = 0;
  double mean_ms = 0;
  double p50_ms = 0;
  double p99_ms = 0;
  double max_ms = 0;
};

LatencyStats latency_stats(std::vector<double> samples);

// Streams the corpus through a pool and detector; latency runs from publication to verdict.
LatencyStats measure_detection_latency(const ScenarioSpec& corpus, const detector::DetectorConfig& config);

struct BenchRecord {
  std::size_t txs = 0;
  int repetitions = 0;
  double mean_us_prefilter = 0;
  double mean_us_full = 0;
  double reduction_percent = 0;
  std::size_t flagged_prefilter = 0;
  std::size_t flagged_full = 0;
  bool flagged_sets_equal = false;
};

BenchRecord bench_prefilter(const ScenarioSpec& corpus, int repetitions = 5);
std::string bench_json(const BenchRecord& record);

}  // namespace flashguard::harness
