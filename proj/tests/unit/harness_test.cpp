#include <gtest/gtest.h>

#include "flashguard/harness.hpp"

using namespace flashguard;
using namespace flashguard::harness;
using scenarios::build_hedgey_scenario;

TEST(Harness, HedgeyBaselineLosesVault) {
  RunConfig cfg;
  cfg.mode = RunMode::Baseline;
  auto r = run_scenario(build_hedgey_scenario(), cfg);
  EXPECT_EQ(r.attack_status, "Success");
  EXPECT_EQ(r.loss, 1'300'000);
  EXPECT_GT(r.attacker_gain, 0);
  EXPECT_TRUE(r.mismatches.empty());
}

TEST(Harness, HedgeyDisruptedBySfsd) {
  RunConfig cfg;
  auto r = run_scenario(build_hedgey_scenario(), cfg);
  EXPECT_TRUE(r.detected);
  EXPECT_TRUE(r.disrupted);
  ASSERT_TRUE(r.disruption_mode);
  EXPECT_EQ(*r.disruption_mode, disruptor::DisruptionMode::SFSD);
  EXPECT_EQ(r.attack_status, "Reverted");
  EXPECT_EQ(r.loss, 1);
  EXPECT_EQ(r.rescued, 1'299'999);
  EXPECT_EQ(r.attacker_gain, 0);
  EXPECT_TRUE(r.provider_liquidity_unchanged);
  EXPECT_EQ(r.relay.accepted, 1u);
  EXPECT_EQ(r.relay.order_violations, 0u);
  EXPECT_EQ(r.relay.leaks, 0u);
  EXPECT_TRUE(r.mismatches.empty());
}

TEST(Harness, DetectOnlyChangesNothing) {
  RunConfig cfg;
  cfg.mode = RunMode::DetectOnly;
  auto r = run_scenario(build_hedgey_scenario(), cfg);
  EXPECT_TRUE(r.detected);
  EXPECT_FALSE(r.disrupted);
  EXPECT_EQ(r.loss, r.baseline_loss);
  EXPECT_TRUE(r.mismatches.empty());
}

TEST(Harness, VerdictDelayBoundary) {
  // Attack arrives at 3000 ms; the first block snapshots at 12000 - 2000.
  RunConfig cfg;
  cfg.verdict_delay_ms = 7000;
  auto in_time = run_scenario(build_hedgey_scenario(), cfg);
  EXPECT_TRUE(in_time.disrupted);
  EXPECT_EQ(in_time.verdict_at_ms, 10000);
  EXPECT_EQ(in_time.relay.accepted, 1u);

  cfg.verdict_delay_ms = 7001;
  auto late = run_scenario(build_hedgey_scenario(), cfg);
  EXPECT_FALSE(late.disrupted);
  EXPECT_EQ(late.relay.too_late, 1u);
  EXPECT_EQ(late.attack_status, "Success");
  EXPECT_EQ(late.loss, 1'300'000);
  EXPECT_FALSE(late.miss_reason.empty());
  EXPECT_EQ(late.relay.leaks, 0u);
  EXPECT_FALSE(late.mismatches.empty());
}

TEST(Harness, ConfigValidation) {
  RunConfig cfg;
  cfg.sealing_grace_ms = 12000;
  EXPECT_THROW(cfg.validate(12000), Error);
  cfg.sealing_grace_ms = 2000;
  EXPECT_NO_THROW(cfg.validate(12000));
  cfg.verdict_delay_ms = -1;
  EXPECT_THROW(cfg.validate(12000), Error);
  EXPECT_THROW(parse_run_mode("turbo"), Error);
  EXPECT_EQ(parse_run_mode("detect"), RunMode::DetectOnly);
}

TEST(Harness, ExitCodeReflectsMismatches) {
  auto spec = build_hedgey_scenario();
  RunConfig cfg;
  EXPECT_EQ(exit_code(run({spec}, cfg)), 0);
  spec.expected.loss_without_guard = 5;
  EXPECT_EQ(exit_code(run({spec}, cfg)), 1);
}

TEST(Harness, StrippedReportIsDeterministic) {
  RunConfig cfg;
  auto specs = load_scenarios({"builtin:hedgey", "builtin:unseen"}, 1);
  auto a = report_json(run(specs, cfg));
  auto b = report_json(run(specs, cfg));
  EXPECT_EQ(strip_timing(a), strip_timing(b));
  EXPECT_EQ(strip_timing(a).find("\"timing\""), std::string::npos);
  EXPECT_NE(a.find("\"timing\""), std::string::npos);
}

TEST(Harness, CsvHasOneRowPerScenario) {
  RunConfig cfg;
  auto report = run(load_scenarios({"builtin:presets"}, 1), cfg);
  auto csv = report_csv(report);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 21);
  EXPECT_EQ(csv.rfind("scenario,chain,DeT(ms),#txs,#Entities,DD,MF,TK,", 0), 0u);
}

TEST(Harness, UnknownBuiltinRejected) { EXPECT_THROW(load_scenarios({"builtin:nope"}, 1), Error); }

TEST(Fpr, SingleUnknownBotInTenThousand) {
  scenarios::TrafficProfile p;
  p.name = "one";
  p.unknown_bot_ppm = 100;
  auto corpus = scenarios::build_benign_corpus(p, 10'000, 4);
  auto r = evaluate_corpus(corpus, detector::Mode::Scan);
  EXPECT_EQ(r.total, 10'000u);
  EXPECT_EQ(r.flagged, 1u);
  EXPECT_EQ(r.unknown_bots, 1u);
  EXPECT_EQ(r.flagged_unexpected, 0u);
  EXPECT_DOUBLE_EQ(r.fpr, 0.0001);

  auto cleared = scenarios::build_benign_corpus(p, 10'000, 4, true);
  EXPECT_EQ(evaluate_corpus(cleared, detector::Mode::Scan).flagged, 0u);
}

TEST(Fpr, NoExclusionsFlagsKnownBots) {
  FprConfig cfg;
  cfg.count_per_profile = 2000;
  cfg.profiles.resize(1);
  cfg.exclusions = ExclusionPolicy::None;
  auto none = evaluate_fpr(cfg);
  cfg.exclusions = ExclusionPolicy::KnownBots;
  auto known = evaluate_fpr(cfg);
  cfg.exclusions = ExclusionPolicy::AllBots;
  auto all = evaluate_fpr(cfg);
  EXPECT_GT(none.flagged, known.flagged);
  EXPECT_EQ(all.flagged, 0u);
}

TEST(Fpr, CorpusConfigParsing) {
  auto cfg = parse_corpus_config(R"({"seed": 3, "count_per_profile": 50, "exclusions": "all",
    "profiles": ["base", {"name": "custom", "unknown_bot_ppm": 2000}]})");
  EXPECT_EQ(cfg.seed, 3u);
  EXPECT_EQ(cfg.count_per_profile, 50u);
  EXPECT_EQ(cfg.exclusions, ExclusionPolicy::AllBots);
  ASSERT_EQ(cfg.profiles.size(), 2u);
  EXPECT_EQ(cfg.profiles[1].unknown_bot_ppm, 2000u);
  EXPECT_THROW(parse_corpus_config(R"({"exclusions": "most"})"), Error);
}

TEST(Latency, NearestRankPercentiles) {
  std::vector<double> xs;
  for (int i = 1; i <= 100; ++i) xs.push_back(i);
  auto s = latency_stats(xs);
  EXPECT_EQ(s.count, 100u);
  EXPECT_DOUBLE_EQ(s.mean_ms, 50.5);
  EXPECT_DOUBLE_EQ(s.p50_ms, 50);
  EXPECT_DOUBLE_EQ(s.p99_ms, 99);
  EXPECT_DOUBLE_EQ(s.max_ms, 100);
  EXPECT_EQ(latency_stats({}).count, 0u);
}
