#include "flashguard/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <queue>
#include <set>

#include "flashguard/mempool.hpp"
#include "flashguard/relay.hpp"
#include "flashguard/scenario_io.hpp"

namespace flashguard::harness {

namespace {

using namespace chainsim;
using calldata::SignatureDatabase;
using Clock = std::chrono::steady_clock;

enum class EventKind : std::uint8_t { Arrival = 0, Verdict = 1, Build = 2 };

struct Event {
  std::int64_t at_ms;
  EventKind kind;
  std::uint64_t seq;
  std::size_t index;

  bool operator>(const Event& o) const {
    if (at_ms != o.at_ms) return at_ms > o.at_ms;
    if (kind != o.kind) return kind > o.kind;
    return seq > o.seq;
  }
};

struct Position {
  std::uint64_t block = 0;
  std::size_t index = 0;
  TxStatus status = TxStatus::Success;
  Gas gas_used = 0;
  Lane lane = Lane::Pool;
  auto operator<=>(const Position& o) const { return std::tie(block, index) <=> std::tie(o.block, o.index); }
};

struct PendingVerdict {
  detector::DetectionVerdict verdict;
  std::shared_ptr<const Transaction> tx;
};

struct SimResult {
  WorldState world;
  std::map<Hash32, Position> included;
  std::map<Hash32, detector::DetectionVerdict> verdicts;
  std::map<Hash32, std::int64_t> verdict_at;
  std::vector<disruptor::Attempt> attempts;
  std::map<Hash32, Hash32> counter_target;
  std::set<Hash32> observed;
  std::set<Hash32> relay_accepted;
  std::map<Hash32, ExecutionTrace> traces;
  std::size_t blocks = 0;
  std::int64_t interval = 0;
};

SimResult simulate(const ScenarioSpec& spec, const RunConfig& cfg, RunMode mode) {
  const std::int64_t interval = cfg.block_interval_ms > 0 ? cfg.block_interval_ms : spec.chain_profile.block_interval_ms;
  cfg.validate(interval);
  const GasSchedule& gas = spec.chain_profile.gas;

  SimResult out;
  out.interval = interval;
  out.world = spec.genesis;
  WorldState& world = out.world;

  mempool::PendingPool pool;
  auto det_sub = pool.subscribe();
  auto observer = pool.subscribe();
  relay::RelayQueue relay;

  detector::DetectorConfig dcfg;
  dcfg.mode = cfg.detector_mode;
  dcfg.use_prefilter = cfg.prefilter;
  dcfg.gas = gas;
  auto db = cfg.signatures_path.empty() ? SignatureDatabase::builtin() : SignatureDatabase::load(cfg.signatures_path);
  detector::Detector det(std::make_shared<const SignatureDatabase>(std::move(db)),
                         std::make_shared<const detector::ExclusionList>(spec.exclusions), dcfg);
  disruptor::Disruptor dis(spec.roles.guardian,
                           std::make_shared<const disruptor::SubscriptionRegistry>(spec.subscriptions), gas);

  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  std::uint64_t seq = 0;
  for (std::size_t i = 0; i < spec.traffic.size(); ++i)
    events.push({spec.traffic[i].at_ms, EventKind::Arrival, seq++, i});
  events.push({interval - cfg.sealing_grace_ms, EventKind::Build, seq++, 1});

  std::vector<PendingVerdict> pending;
  std::size_t arrivals_left = spec.traffic.size();
  const bool guard = mode != RunMode::Baseline;

  auto pump = [&](std::int64_t now) {
    while (auto ev = observer->try_next())
      if (ev->kind == mempool::EventKind::Added) out.observed.insert(ev->tx_hash);
    while (auto ev = det_sub->try_next()) {
      if (!guard) continue;
      auto v = det.on_event(*ev, &world);
      if (!v) continue;
      out.verdicts[v->tx_hash] = *v;
      if (!v->flagged || mode != RunMode::DetectAndDisrupt) continue;
      std::int64_t delay = cfg.detector_cost_ms + cfg.verdict_delay_ms + cfg.relay_latency_ms;
      if (cfg.wall_clock) delay += static_cast<std::int64_t>(std::ceil(v->detection_latency_ms));
      pending.push_back({*v, ev->tx});
      events.push({now + delay, EventKind::Verdict, seq++, pending.size() - 1});
    }
  };

  while (!events.empty()) {
    Event e = events.top();
    events.pop();
    switch (e.kind) {
      case EventKind::Arrival: {
        --arrivals_left;
        try {
          pool.submit(spec.traffic[e.index].tx, e.at_ms);
        } catch (const Error&) {
          // Duplicate submissions are ignored, as a node would.
        }
        pump(e.at_ms);
        break;
      }
      case EventKind::Verdict: {
        const auto& pv = pending[e.index];
        out.verdict_at[pv.verdict.tx_hash] = e.at_ms;
        auto attempt = dis.handle(pv.verdict, *pv.tx, world, relay, pool, e.at_ms);
        if (attempt.plan && attempt.receipt == relay::Receipt::Accepted)
          out.counter_target[attempt.plan->counter_tx.hash] = attempt.target_attack_hash;
        out.attempts.push_back(std::move(attempt));
        break;
      }
      case EventKind::Build: {
        auto drain = relay.drain_for_block(pool);
        BuildOptions opts;
        opts.capacity = spec.chain_profile.block_capacity;
        opts.gas = gas;
        auto res = build_block(world, pool.candidates(), drain.lane, opts);
        world = std::move(res.world);
        const std::uint64_t k = e.index;
        for (std::size_t i = 0; i < res.block.transactions.size(); ++i) {
          const auto& tx = res.block.transactions[i];
          const auto& tr = res.block.traces[i];
          out.included[tx.hash] = {k, i, tr.status, tr.gas_used, res.block.lanes[i]};
          out.traces[tx.hash] = tr;
        }
        pool.on_block(res.block, e.at_ms);
        for (const auto& h : res.dropped) pool.drop(h, e.at_ms);
        pump(e.at_ms);
        dis.resync(world, relay.size());
        out.blocks = k;
        // Remaining events are arrivals or verdicts, since only one build is queued at a time.
        bool done = arrivals_left == 0 && events.empty() && pool.size() == 0 && relay.size() == 0;
        if (!done && k < cfg.max_blocks)
          events.push({static_cast<std::int64_t>(k + 1) * interval - cfg.sealing_grace_ms, EventKind::Build, seq++,
                       k + 1});
        break;
      }
    }
  }
  out.relay_accepted = relay.accepted_hashes();
  pool.close();
  return out;
}

Amount positive_loss(const WorldState& before, const WorldState& after, const Address& holder) {
  Amount loss = 0;
  for (const auto& [tok, ledger] : before.tokens) {
    Amount b = ledger.balance_of(holder);
    Amount a = after.balance_of(tok, holder);
    if (a < b) loss += b - a;
  }
  return loss;
}

Amount positive_gain(const WorldState& before, const WorldState& after, const Address& holder) {
  return positive_loss(after, before, holder);
}

struct Outcome {
  Amount loss{};
  Amount attacker_gain{};
  Amount dust{};
  Gas counter_gas = 0;
};

Outcome outcome_of(const ScenarioSpec& spec, const SimResult& sim) {
  Outcome o;
  if (!spec.roles.victim.is_zero()) o.loss = positive_loss(spec.genesis, sim.world, spec.roles.victim);
  for (const auto& a : sim.attempts) {
    if (!a.plan) continue;
    auto it = sim.included.find(a.plan->counter_tx.hash);
    if (it == sim.included.end()) continue;
    o.counter_gas += it->second.gas_used;
    if (it->second.status != TxStatus::Success) continue;
    o.dust += a.plan->dust;
    if (a.plan->mode == disruptor::DisruptionMode::SFSD) o.loss += a.plan->dust;
  }
  for (const auto* who : {&spec.roles.attacker_eoa, &spec.roles.attacker_contract})
    if (!who->is_zero()) o.attacker_gain += positive_gain(spec.genesis, sim.world, *who);
  return o;
}

}  // namespace

const char* to_string(RunMode m) {
  switch (m) {
    case RunMode::Baseline: return "baseline";
    case RunMode::DetectOnly: return "detect";
    case RunMode::DetectAndDisrupt: return "disrupt";
  }
  return "disrupt";
}

RunMode parse_run_mode(std::string_view text) {
  for (auto m : {RunMode::Baseline, RunMode::DetectOnly, RunMode::DetectAndDisrupt})
    if (text == to_string(m)) return m;
  throw Error(ErrorCode::ConfigError, "unknown mode '" + std::string(text) + "' (expected baseline, detect or disrupt)");
}

void RunConfig::validate(std::int64_t interval_ms) const {
  if (interval_ms <= 0) throw Error(ErrorCode::ConfigError, "block interval must be positive");
  if (sealing_grace_ms < 0 || sealing_grace_ms >= interval_ms)
    throw Error(ErrorCode::ConfigError, "sealing grace " + std::to_string(sealing_grace_ms) +
                                            " ms must be in [0, block interval " + std::to_string(interval_ms) + " ms)");
  if (detector_cost_ms < 0 || verdict_delay_ms < 0 || relay_latency_ms < 0)
    throw Error(ErrorCode::ConfigError, "injected delays must be non-negative");
  if (max_blocks == 0) throw Error(ErrorCode::ConfigError, "max_blocks must be positive");
}

ScenarioRecord run_scenario(const ScenarioSpec& spec, const RunConfig& config) {
  ScenarioRecord r;
  r.name = spec.name;
  r.chain = spec.chain_profile.name;
  r.mode = config.mode;

  const auto* attack = spec.attack();
  SimResult base = simulate(spec, config, RunMode::Baseline);
  Outcome base_out = outcome_of(spec, base);
  SimResult sim = config.mode == RunMode::Baseline ? base : simulate(spec, config, config.mode);
  Outcome out = outcome_of(spec, sim);

  r.blocks = sim.blocks;
  r.loss = out.loss;
  r.baseline_loss = base_out.loss;
  r.attacker_gain = out.attacker_gain;
  r.dust_spent = out.dust;
  r.counter_gas_used = out.counter_gas;
  r.providers_solvent = providers_solvent(sim.world);
  if (!spec.roles.provider.is_zero()) {
    for (const auto& [tok, ledger] : spec.genesis.tokens)
      if (ledger.balance_of(spec.roles.provider) != sim.world.balance_of(tok, spec.roles.provider))
        r.provider_liquidity_unchanged = false;
  }
  if (r.loss > r.baseline_loss)
    r.mismatches.push_back("loss " + r.loss.str() + " exceeds baseline loss " + r.baseline_loss.str());
  else
    r.rescued = r.baseline_loss - r.loss;

  if (spec.subscriptions.find(spec.roles.victim))
    r.disruption_mode = disruptor::DisruptionMode::ABSD;
  else if (!spec.roles.victim.is_zero())
    r.disruption_mode = disruptor::DisruptionMode::SFSD;

  // Traffic classification.
  for (const auto& t : spec.traffic) {
    auto v = sim.verdicts.find(t.tx.hash);
    bool flagged = v != sim.verdicts.end() && v->second.flagged;
    if (t.role == scenarios::TrafficRole::Attack) {
      r.detected = r.detected || flagged;
      if (v != sim.verdicts.end()) {
        r.detection_latency_ms = v->second.detection_latency_ms;
        r.classify_ms = v->second.classify_ms;
      }
    } else {
      ++r.benign_total;
      if (flagged) ++r.benign_flagged;
    }
  }

  if (attack) {
    const Hash32& h = attack->tx.hash;
    auto it = sim.included.find(h);
    if (it == sim.included.end()) {
      r.attack_status = "NotIncluded";
    } else {
      r.attack_status = to_string(it->second.status);
      r.attack_block = it->second.block;
      r.seal_at_ms = static_cast<std::int64_t>(it->second.block) * sim.interval;
      if (it->second.status != TxStatus::Success) {
        for (const auto& [counter, target] : sim.counter_target) {
          if (target != h) continue;
          auto c = sim.included.find(counter);
          if (c != sim.included.end() && c->second < it->second && c->second.status == TxStatus::Success)
            r.disrupted = true;
        }
      }
    }
    if (auto va = sim.verdict_at.find(h); va != sim.verdict_at.end()) r.verdict_at_ms = va->second;
    for (const auto& a : sim.attempts) {
      if (a.target_attack_hash != h) continue;
      r.disruption_latency_ms = a.plan_ms;
      if (!a.miss_reason.empty()) r.miss_reason = a.miss_reason;
      if (a.plan) r.disruption_mode = a.plan->mode;
    }
    auto bt = base.traces.find(h);
    if (bt != base.traces.end()) r.shape = scenarios::measure_shape(bt->second, spec.genesis, attack->tx.from);
    if (spec.expected.shape) r.shape_matches = r.shape && scenarios::matches(*r.shape, *spec.expected.shape);
  } else {
    r.attack_status = "None";
  }

  for (const auto& a : sim.attempts) {
    if (!a.receipt) continue;
    switch (*a.receipt) {
      case relay::Receipt::Accepted: ++r.relay.accepted; break;
      case relay::Receipt::TooLate: ++r.relay.too_late; break;
      case relay::Receipt::Duplicate: ++r.relay.duplicate; break;
    }
  }
  for (const auto& [counter, target] : sim.counter_target) {
    auto t = sim.included.find(target);
    if (t == sim.included.end()) continue;
    auto c = sim.included.find(counter);
    if (c == sim.included.end() || !(c->second < t->second)) ++r.relay.order_violations;
  }
  for (const auto& h : sim.relay_accepted)
    if (sim.observed.count(h)) ++r.relay.leaks;

  // Expected outcomes.
  auto mismatch = [&](std::string what) { r.mismatches.push_back(std::move(what)); };
  const auto& ex = spec.expected;
  if (attack && base_out.loss != ex.loss_without_guard)
    mismatch("baseline loss " + base_out.loss.str() + " != expected " + ex.loss_without_guard.str());
  if (!r.shape_matches) mismatch("attack trace shape differs from the declared shape");
  if (r.relay.order_violations) mismatch("relay counter not ahead of its target");
  if (r.relay.leaks) mismatch("relay transaction visible in the public stream");
  if (config.mode == RunMode::Baseline) {
    if (attack && r.attack_status != "Success") mismatch("undisrupted attack did not succeed: " + r.attack_status);
  } else {
    if (r.detected != ex.detected)
      mismatch(std::string("detected=") + (r.detected ? "true" : "false") + ", expected " +
               (ex.detected ? "true" : "false"));
    if (config.mode == RunMode::DetectOnly && r.loss != r.baseline_loss) mismatch("detect-only run changed the loss");
    if (config.mode == RunMode::DetectAndDisrupt && attack && r.disruption_mode) {
      bool want = *r.disruption_mode == disruptor::DisruptionMode::ABSD ? ex.disrupted_absd : ex.disrupted_sfsd;
      if (r.disrupted != want)
        mismatch(std::string("disrupted=") + (r.disrupted ? "true" : "false") + " under " +
                 disruptor::to_string(*r.disruption_mode) + ", expected " + (want ? "true" : "false"));
      if (r.disrupted) {
        if (r.attacker_gain != 0) mismatch("attacker gained " + r.attacker_gain.str() + " despite disruption");
        if (r.loss > spec.roles.guardian.dust) mismatch("loss " + r.loss.str() + " exceeds dust after disruption");
        if (!r.provider_liquidity_unchanged) mismatch("provider liquidity changed");
      }
    }
  }
  return r;
}

MetricsReport run(const std::vector<ScenarioSpec>& specs, const RunConfig& config) {
  MetricsReport rep;
  rep.config = config;
  auto& ag = rep.aggregate;
  std::vector<double> det_latency;
  double disruption_sum = 0;
  std::size_t disruption_n = 0;
  std::size_t correct = 0, total = 0;
  for (const auto& spec : specs) {
    auto r = run_scenario(spec, config);
    ++ag.scenarios;
    if (r.detected) ++ag.detected;
    if (r.disrupted) ++ag.disrupted;
    if (!r.mismatches.empty()) ++ag.mismatched;
    ag.total_loss += r.loss;
    ag.total_baseline_loss += r.baseline_loss;
    ag.total_rescued += r.rescued;
    ag.total_dust += r.dust_spent;
    ag.benign_total += r.benign_total;
    ag.benign_flagged += r.benign_flagged;
    correct += r.benign_total - r.benign_flagged;
    total += r.benign_total;
    if (spec.attack()) {
      ++total;
      if (r.detected) ++correct;
      if (config.mode != RunMode::Baseline) det_latency.push_back(r.detection_latency_ms);
    }
    if (r.relay.accepted) {
      disruption_sum += r.disruption_latency_ms;
      ++disruption_n;
    }
    rep.scenarios.push_back(std::move(r));
  }
  if (ag.benign_total) ag.fpr = static_cast<double>(ag.benign_flagged) / static_cast<double>(ag.benign_total);
  if (total) ag.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  auto stats = latency_stats(det_latency);
  ag.mean_detection_latency_ms = stats.mean_ms;
  ag.p50_detection_latency_ms = stats.p50_ms;
  ag.p99_detection_latency_ms = stats.p99_ms;
  if (disruption_n) ag.mean_disruption_latency_ms = disruption_sum / static_cast<double>(disruption_n);
  return rep;
}

MetricsReport run(const RunConfig& config) {
  if (config.scenario_paths.empty()) throw Error(ErrorCode::ConfigError, "no scenarios given");
  auto rep = run(load_scenarios(config.scenario_paths, config.seed), config);
  write_report(rep);
  return rep;
}

int exit_code(const MetricsReport& report) { return report.aggregate.mismatched == 0 ? 0 : 1; }

std::vector<ScenarioSpec> load_scenarios(const std::vector<std::string>& paths, std::uint64_t seed) {
  std::vector<ScenarioSpec> out;
  for (const auto& p : paths) {
    if (p == "builtin:hedgey") {
      out.push_back(scenarios::build_hedgey_scenario());
    } else if (p == "builtin:presets") {
      for (auto& s : scenarios::build_all_presets(seed)) out.push_back(std::move(s));
    } else if (p == "builtin:unseen") {
      for (auto& s : scenarios::build_unseen_scenarios()) out.push_back(std::move(s));
    } else if (p.rfind("builtin:", 0) == 0) {
      std::string name = p.substr(8);
      const auto& presets = scenarios::historical_presets();
      auto it = std::find_if(presets.begin(), presets.end(), [&](const auto& x) { return x.name == name; });
      if (it == presets.end()) throw Error(ErrorCode::ConfigError, "unknown builtin scenario '" + name + "'");
      out.push_back(scenarios::build_preset(*it, seed));
    } else {
      out.push_back(scenario_io::load(p));
    }
  }
  return out;
}

// ---- FPR ----

std::vector<ScenarioSpec> build_corpora(const FprConfig& config) {
  std::vector<ScenarioSpec> out;
  for (std::size_t i = 0; i < config.profiles.size(); ++i) {
    auto c = scenarios::build_benign_corpus(config.profiles[i], config.count_per_profile, config.seed + i,
                                            config.exclusions == ExclusionPolicy::AllBots);
    if (config.exclusions == ExclusionPolicy::None) c.exclusions = {};
    out.push_back(std::move(c));
  }
  return out;
}

FprProfileRecord evaluate_corpus(const ScenarioSpec& corpus, detector::Mode mode) {
  FprProfileRecord r;
  r.name = corpus.name;
  auto db = calldata::SignatureDatabase::builtin();
  for (const auto& t : corpus.traffic) {
    ++r.total;
    if (t.role == scenarios::TrafficRole::UnknownBot) ++r.unknown_bots;
    bool flagged = detector::prefilter(t.tx, db, corpus.exclusions) &&
                   detector::classify(t.tx, db, corpus.exclusions, mode, &corpus.genesis, {}, corpus.chain_profile.gas)
                       .flagged;
    if (!flagged) continue;
    ++r.flagged;
    if (t.role != scenarios::TrafficRole::UnknownBot) ++r.flagged_unexpected;
  }
  if (r.total) {
    r.fpr = static_cast<double>(r.flagged) / static_cast<double>(r.total);
    r.accuracy = 1.0 - r.fpr;
  }
  return r;
}

FprRecord evaluate_fpr(const FprConfig& config) {
  if (config.count_per_profile == 0) throw Error(ErrorCode::ConfigError, "count_per_profile must be positive");
  FprRecord out;
  for (const auto& c : build_corpora(config)) {
    auto r = evaluate_corpus(c, config.mode);
    out.total += r.total;
    out.flagged += r.flagged;
    out.profiles.push_back(std::move(r));
  }
  if (out.total) {
    out.fpr = static_cast<double>(out.flagged) / static_cast<double>(out.total);
    out.accuracy = 1.0 - out.fpr;
  }
  return out;
}

// ---- latency ----

LatencyStats latency_stats(std::vector<double> samples) {
  LatencyStats s;
  s.count = samples.size();
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  double sum = 0;
  for (double x : samples) sum += x;
  s.mean_ms = sum / static_cast<double>(samples.size());
  auto rank = [&](double q) {
    auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(samples.size())));
    return samples[std::min(samples.size() - 1, idx == 0 ? 0 : idx - 1)];
  };
  s.p50_ms = rank(0.50);
  s.p99_ms = rank(0.99);
  s.max_ms = samples.back();
  return s;
}

LatencyStats measure_detection_latency(const ScenarioSpec& corpus, const detector::DetectorConfig& config) {
  mempool::PendingPool pool;
  auto sub = pool.subscribe();
  detector::Detector det(std::make_shared<const calldata::SignatureDatabase>(calldata::SignatureDatabase::builtin()),
                         std::make_shared<const detector::ExclusionList>(corpus.exclusions), config);
  std::vector<double> samples;
  samples.reserve(corpus.traffic.size());
  for (const auto& t : corpus.traffic) {
    try {
      pool.submit(t.tx, t.at_ms);
    } catch (const Error&) {
      continue;
    }
    while (auto ev = sub->try_next())
      if (auto v = det.on_event(*ev, &corpus.genesis)) samples.push_back(v->detection_latency_ms);
  }
  pool.close();
  return latency_stats(std::move(samples));
}

BenchRecord bench_prefilter(const ScenarioSpec& corpus, int repetitions) {
  BenchRecord r;
  r.txs = corpus.traffic.size();
  r.repetitions = std::max(1, repetitions);
  auto db = calldata::SignatureDatabase::builtin();
  const auto& ex = corpus.exclusions;
  std::set<Hash32> with, without;
  double best_with = 0, best_without = 0;
  for (int rep = 0; rep < r.repetitions; ++rep) {
    auto pass = [&](bool use_prefilter, std::set<Hash32>* flagged) {
      auto t0 = Clock::now();
      for (const auto& t : corpus.traffic) {
        bool f = (!use_prefilter || detector::prefilter(t.tx, db, ex)) &&
                 detector::classify(t.tx, db, ex, detector::Mode::Scan).flagged;
        if (f && flagged) flagged->insert(t.tx.hash);
      }
      return std::chrono::duration<double, std::micro>(Clock::now() - t0).count();
    };
    // Alternate the order so cache warm-up does not favour one pipeline.
    double a, b;
    if (rep % 2 == 0) {
      a = pass(true, rep == 0 ? &with : nullptr);
      b = pass(false, rep == 0 ? &without : nullptr);
    } else {
      b = pass(false, nullptr);
      a = pass(true, nullptr);
    }
    best_with = rep == 0 ? a : std::min(best_with, a);
    best_without = rep == 0 ? b : std::min(best_without, b);
  }
  if (r.txs) {
    r.mean_us_prefilter = best_with / static_cast<double>(r.txs);
    r.mean_us_full = best_without / static_cast<double>(r.txs);
  }
  if (r.mean_us_full > 0) r.reduction_percent = 100.0 * (1.0 - r.mean_us_prefilter / r.mean_us_full);
  r.flagged_prefilter = with.size();
  r.flagged_full = without.size();
  r.flagged_sets_equal = with == without;
  return r;
}

}  // namespace flashguard::harness
