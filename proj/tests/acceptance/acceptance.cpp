// Acceptance gate: one PASS/FAIL line per criterion. Exit status is nonzero on any failure.
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "flashguard/harness.hpp"

using namespace flashguard;
using harness::RunConfig;
using harness::RunMode;
using scenarios::ScenarioSpec;

namespace {

// Pinned tolerances.
constexpr std::size_t kPresets = 20;
constexpr double kLatencyP99Ms = 150.0;
constexpr double kLatencyMeanMs = 50.0;
constexpr std::size_t kLatencyCorpus = 10'000;
constexpr std::size_t kFprCorpusPerProfile = 20'000;  // five profiles, 100,000 txs
constexpr double kFprMax = 0.001;
constexpr double kFprPerProfileMax = 0.002;
const Amount kPresetLossTotal = 405'707'500;
const std::vector<std::int64_t> kVerdictDelays = {0, 1000, 4000, 6999, 7000, 7001, 9000, 15000};

struct Result {
  bool pass = false;
  std::string detail;
};

std::vector<ScenarioSpec> all_scenarios() {
  auto specs = scenarios::build_all_presets(1);
  specs.push_back(scenarios::build_hedgey_scenario());
  for (auto& s : scenarios::build_unseen_scenarios()) specs.push_back(std::move(s));
  return specs;
}

std::string join(const std::vector<std::string>& xs, std::size_t limit = 4) {
  std::string out;
  for (std::size_t i = 0; i < xs.size() && i < limit; ++i) out += (i ? "; " : "") + xs[i];
  if (xs.size() > limit) out += "; +" + std::to_string(xs.size() - limit) + " more";
  return out;
}

Result detection_completeness(const harness::MetricsReport& presets) {
  std::size_t flagged = 0;
  for (const auto& r : presets.scenarios) flagged += r.detected;
  return {flagged == kPresets && presets.scenarios.size() == kPresets,
          std::to_string(flagged) + "/" + std::to_string(presets.scenarios.size()) + " presets flagged"};
}

Result detection_latency(const ScenarioSpec& corpus) {
  auto s = harness::measure_detection_latency(corpus, {});
  char buf[160];
  std::snprintf(buf, sizeof buf, "n=%zu mean=%.4f ms p50=%.4f ms p99=%.4f ms max=%.4f ms", s.count, s.mean_ms,
                s.p50_ms, s.p99_ms, s.max_ms);
  return {s.count == corpus.traffic.size() && s.p99_ms <= kLatencyP99Ms && s.mean_ms <= kLatencyMeanMs, buf};
}

Result false_positive_rate() {
  harness::FprConfig cfg;
  cfg.count_per_profile = kFprCorpusPerProfile;
  cfg.exclusions = harness::ExclusionPolicy::KnownBots;
  auto known = harness::evaluate_fpr(cfg);
  cfg.exclusions = harness::ExclusionPolicy::AllBots;
  auto all = harness::evaluate_fpr(cfg);
  bool ok = known.total >= 100'000 && known.fpr <= kFprMax && all.flagged == 0 && all.total == known.total;
  std::ostringstream d;
  d.precision(4);
  d << "total=" << known.total << " fpr=" << known.fpr * 100 << "% (";
  for (const auto& p : known.profiles) {
    ok = ok && p.fpr <= kFprPerProfileMax && p.flagged_unexpected == 0;
    d << p.name << " " << p.fpr * 100 << "% ";
  }
  d << ") all-excluded flagged=" << all.flagged;
  return {ok, d.str()};
}

Result disruption_effectiveness(const harness::MetricsReport& presets) {
  std::vector<std::string> bad;
  Amount rescued = 0;
  Amount dust = 0;
  for (const auto& r : presets.scenarios) {
    rescued += r.rescued;
    dust += r.dust_spent;
    if (r.attack_status != "Reverted" && r.attack_status != "OutOfGas") bad.push_back(r.name + " status " + r.attack_status);
    if (r.attacker_gain != 0) bad.push_back(r.name + " attacker gain " + r.attacker_gain.str());
    if (r.loss > 1) bad.push_back(r.name + " loss " + r.loss.str());
    if (!r.provider_liquidity_unchanged) bad.push_back(r.name + " provider liquidity changed");
    if (r.rescued + r.loss != r.baseline_loss) bad.push_back(r.name + " rescued + loss != baseline loss");
  }
  bool total_ok = rescued == kPresetLossTotal - dust;
  if (!total_ok) bad.push_back("rescued " + rescued.str() + " != " + (kPresetLossTotal - dust).str());
  return {bad.empty() && presets.scenarios.size() == kPresets,
          "rescued=" + rescued.str() + " dust=" + dust.str() + (bad.empty() ? "" : " | " + join(bad))};
}

Result unseen_matrix() {
  RunConfig cfg;
  auto report = harness::run(scenarios::build_unseen_scenarios(), cfg);
  std::string pattern;
  std::vector<std::string> bad;
  for (const auto& r : report.scenarios) {
    pattern += r.name + "=" + (r.disrupted ? "Yes" : "No") + " ";
    for (const auto& m : r.mismatches) bad.push_back(r.name + ": " + m);
  }
  return {report.scenarios.size() == 6 && bad.empty(), pattern + (bad.empty() ? "" : "| " + join(bad))};
}

Result atomicity(const std::vector<ScenarioSpec>& specs) {
  using chainsim::FailureInjection;
  std::size_t txs = 0, runs = 0;
  std::vector<std::string> bad;
  for (const auto& spec : specs) {
    auto world = spec.genesis;
    for (const auto& t : spec.traffic) {
      chainsim::ExecOptions base{.check_nonce = false, .inject = std::nullopt};
      auto clean = chainsim::simulate_transaction(world, t.tx, spec.chain_profile.gas, base);
      for (std::size_t p = 0; p < clean.failure_points; ++p) {
        for (auto kind : {FailureInjection::Kind::GuardFailure, FailureInjection::Kind::GasExhaustion}) {
          chainsim::ExecOptions o = base;
          o.inject = FailureInjection{p, kind};
          auto r = chainsim::apply_transaction(world, t.tx, spec.chain_profile.gas, o);
          ++runs;
          if (r.trace.status == chainsim::TxStatus::Success || !(r.world == world))
            bad.push_back(spec.name + "/" + t.label + " point " + std::to_string(p));
        }
      }
      auto trace = chainsim::apply_transaction_in_place(world, t.tx, spec.chain_profile.gas, base);
      chainsim::settle_transaction(world, t.tx, trace);
      ++txs;
    }
  }
  return {bad.empty() && runs > 0, std::to_string(txs) + " txs, " + std::to_string(runs) + " injected runs, " +
                                       std::to_string(bad.size()) + " violations" +
                                       (bad.empty() ? "" : " | " + join(bad))};
}

Result oracle_equivalence(const std::vector<ScenarioSpec>& specs, const ScenarioSpec& corpus) {
  auto db = calldata::SignatureDatabase::builtin();
  std::size_t n = 0, disagree = 0;
  auto check = [&](const ScenarioSpec& s) {
    for (const auto& t : s.traffic) {
      auto a = detector::classify(t.tx, db, s.exclusions, detector::Mode::Scan);
      auto b = detector::classify(t.tx, db, s.exclusions, detector::Mode::Trace, &s.genesis);
      ++n;
      disagree += a.flagged != b.flagged;
    }
  };
  check(corpus);
  for (const auto& s : specs) check(s);
  auto bench = harness::bench_prefilter(corpus, 15);
  bool faster = bench.mean_us_prefilter < bench.mean_us_full;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "scan/trace disagree %zu/%zu; flagged sets equal=%s (%zu); prefilter %.3f us vs full %.3f us (%.1f%%)",
                disagree, n, bench.flagged_sets_equal ? "yes" : "no", bench.flagged_prefilter, bench.mean_us_prefilter,
                bench.mean_us_full, bench.reduction_percent);
  return {disagree == 0 && bench.flagged_sets_equal && faster, buf};
}

Result selector_vectors() {
  struct V {
    const char* sig;
    std::uint32_t want;
  };
  const V vs[] = {{"transfer(address,uint256)", 0xa9059cbb},
                  {"approve(address,uint256)", 0x095ea7b3},
                  {"withdraw(uint256)", 0x2e1a7d4d}};
  std::string d;
  bool ok = true;
  for (const auto& v : vs) {
    auto s = calldata::compute_selector(v.sig);
    ok = ok && s.value() == v.want;
    d += std::string(v.sig) + "=" + s.hex() + " ";
  }
  return {ok, d};
}

Result relay_contract(const std::vector<ScenarioSpec>& specs) {
  struct Clock {
    std::int64_t interval;
    std::int64_t grace;
  };
  std::size_t runs = 0, accepted = 0, too_late = 0;
  std::vector<std::string> bad;
  for (Clock c : {Clock{12000, 2000}, Clock{2000, 500}}) {
    for (auto delay : kVerdictDelays) {
      RunConfig cfg;
      cfg.block_interval_ms = c.interval;
      cfg.sealing_grace_ms = c.grace;
      cfg.verdict_delay_ms = delay;
      for (const auto& spec : specs) {
        auto r = harness::run_scenario(spec, cfg);
        ++runs;
        accepted += r.relay.accepted;
        too_late += r.relay.too_late;
        if (r.relay.order_violations || r.relay.leaks)
          bad.push_back(spec.name + " delay " + std::to_string(delay) + " interval " + std::to_string(c.interval));
      }
    }
  }
  return {bad.empty(), std::to_string(runs) + " runs, accepted=" + std::to_string(accepted) +
                           " too_late=" + std::to_string(too_late) + (bad.empty() ? "" : " | " + join(bad))};
}

Result determinism(const std::vector<ScenarioSpec>& specs) {
  bool ok = true;
  std::string d;
  for (auto mode : {RunMode::Baseline, RunMode::DetectOnly, RunMode::DetectAndDisrupt}) {
    RunConfig cfg;
    cfg.mode = mode;
    auto a = harness::strip_timing(harness::report_json(harness::run(specs, cfg)));
    auto b = harness::strip_timing(harness::report_json(harness::run(specs, cfg)));
    auto rebuilt = harness::strip_timing(harness::report_json(harness::run(all_scenarios(), cfg)));
    bool same = a == b && a == rebuilt;
    ok = ok && same;
    d += std::string(harness::to_string(mode)) + (same ? " identical " : " DIFFERS ");
  }
  return {ok, d + "(" + std::to_string(specs.size()) + " scenarios)"};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Result()>& f) {
    auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = f();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !r.pass;
    std::printf("%s [%d] %s: %s (%.2f s)\n", r.pass ? "PASS" : "FAIL", id, name, r.detail.c_str(), s);
    std::fflush(stdout);
  };

  auto specs = all_scenarios();
  RunConfig disrupt;
  auto presets = harness::run(scenarios::build_all_presets(1), disrupt);
  auto profile = scenarios::default_profiles().front();
  auto corpus = scenarios::build_benign_corpus(profile, kLatencyCorpus, 7);

  report(1, "detection completeness", [&] { return detection_completeness(presets); });
  report(2, "detection latency", [&] { return detection_latency(corpus); });
  report(3, "false-positive rate", [&] { return false_positive_rate(); });
  report(4, "disruption effectiveness", [&] { return disruption_effectiveness(presets); });
  report(5, "unseen-attack matrix", [&] { return unseen_matrix(); });
  report(6, "atomicity", [&] { return atomicity(specs); });
  report(7, "detector oracle equivalence", [&] { return oracle_equivalence(specs, corpus); });
  report(8, "selector vectors", [&] { return selector_vectors(); });
  report(9, "relay contract", [&] { return relay_contract(specs); });
  report(10, "determinism", [&] { return determinism(specs); });
  std::printf("%d/10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
