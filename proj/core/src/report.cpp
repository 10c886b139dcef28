#include <fstream>
#include <iomanip>
#include <sstream>

#include "flashguard/harness.hpp"
#include "json.hpp"

namespace flashguard::harness {

namespace {

using json = nlohmann::ordered_json;

json shape_json(const scenarios::ShapeCounts& s) {
  return {{"#txs", s.internal_tx_count},
          {"#Entities", s.entity_count},
          {"DD", s.data_dependencies},
          {"MF", s.money_flow_events},
          {"TK", s.token_count}};
}

json record_json(const ScenarioRecord& r) {
  json j{{"name", r.name},
         {"chain", r.chain},
         {"mode", to_string(r.mode)},
         {"disruption_mode", r.disruption_mode ? json(disruptor::to_string(*r.disruption_mode)) : json(nullptr)},
         {"detected", r.detected},
         {"disrupted", r.disrupted},
         {"attack_status", r.attack_status},
         {"attack_block", r.attack_block ? json(*r.attack_block) : json(nullptr)},
         {"verdict_at_ms", r.verdict_at_ms},
         {"seal_at_ms", r.seal_at_ms},
         {"loss", r.loss.str()},
         {"baseline_loss", r.baseline_loss.str()},
         {"rescued", r.rescued.str()},
         {"attacker_gain", r.attacker_gain.str()},
         {"counter_gas_used", r.counter_gas_used},
         {"dust_spent", r.dust_spent.str()},
         {"provider_liquidity_unchanged", r.provider_liquidity_unchanged},
         {"providers_solvent", r.providers_solvent},
         {"blocks", r.blocks},
         {"benign_total", r.benign_total},
         {"benign_flagged", r.benign_flagged},
         {"shape", r.shape ? shape_json(*r.shape) : json(nullptr)},
         {"shape_matches", r.shape_matches},
         {"relay",
          {{"accepted", r.relay.accepted},
           {"too_late", r.relay.too_late},
           {"duplicate", r.relay.duplicate},
           {"order_violations", r.relay.order_violations},
           {"leaks", r.relay.leaks}}},
         {"miss_reason", r.miss_reason},
         {"mismatches", r.mismatches},
         {"timing",
          {{"detection_latency_ms", r.detection_latency_ms},
           {"classify_ms", r.classify_ms},
           {"disruption_latency_ms", r.disruption_latency_ms}}}};
  return j;
}

void erase_timing(json& j) {
  if (j.is_object()) {
    j.erase("timing");
    for (auto& [k, v] : j.items()) erase_timing(v);
  } else if (j.is_array()) {
    for (auto& v : j) erase_timing(v);
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path);
  out << text;
}

detector::Mode parse_detector_mode(const std::string& s, const std::string& where) {
  if (s == "scan") return detector::Mode::Scan;
  if (s == "trace") return detector::Mode::Trace;
  throw Error(ErrorCode::ConfigError, where + ": unknown detector mode '" + s + "'");
}

}  // namespace

std::string report_json(const MetricsReport& rep) {
  const auto& c = rep.config;
  const auto& a = rep.aggregate;
  json scen = json::array();
  for (const auto& r : rep.scenarios) scen.push_back(record_json(r));
  json out{{"format", "flashguard-report/1"},
           {"config",
            {{"mode", to_string(c.mode)},
             {"detector", detector::to_string(c.detector_mode)},
             {"block_interval_ms", c.block_interval_ms},
             {"sealing_grace_ms", c.sealing_grace_ms},
             {"seed", c.seed},
             {"detector_cost_ms", c.detector_cost_ms},
             {"verdict_delay_ms", c.verdict_delay_ms},
             {"relay_latency_ms", c.relay_latency_ms},
             {"wall_clock", c.wall_clock},
             {"prefilter", c.prefilter}}},
           {"scenarios", scen},
           {"aggregate",
            {{"scenarios", a.scenarios},
             {"detected", a.detected},
             {"disrupted", a.disrupted},
             {"mismatched", a.mismatched},
             {"total_loss", a.total_loss.str()},
             {"total_baseline_loss", a.total_baseline_loss.str()},
             {"total_rescued", a.total_rescued.str()},
             {"total_dust", a.total_dust.str()},
             {"benign_total", a.benign_total},
             {"benign_flagged", a.benign_flagged},
             {"fpr", a.fpr},
             {"accuracy", a.accuracy},
             {"timing",
              {{"mean_detection_latency_ms", a.mean_detection_latency_ms},
               {"p50_detection_latency_ms", a.p50_detection_latency_ms},
               {"p99_detection_latency_ms", a.p99_detection_latency_ms},
               {"mean_disruption_latency_ms", a.mean_disruption_latency_ms}}}}}};
  return out.dump(1) + "\n";
}

std::string strip_timing(const std::string& text) {
  json j = json::parse(text);
  erase_timing(j);
  return j.dump(1) + "\n";
}

std::string report_csv(const MetricsReport& rep) {
  std::ostringstream out;
  out << "scenario,chain,DeT(ms),#txs,#Entities,DD,MF,TK,detected,disrupted,attack_status,loss,rescued,counter_gas,dust\n";
  out << std::fixed << std::setprecision(3);
  for (const auto& r : rep.scenarios) {
    out << csv_field(r.name) << ',' << r.chain << ',' << r.detection_latency_ms << ',';
    if (r.shape)
      out << r.shape->internal_tx_count << ',' << r.shape->entity_count << ',' << r.shape->data_dependencies << ','
          << r.shape->money_flow_events << ',' << r.shape->token_count << ',';
    else
      out << ",,,,,";
    out << (r.detected ? "true" : "false") << ',' << (r.disrupted ? "true" : "false") << ',' << r.attack_status << ','
        << r.loss << ',' << r.rescued << ',' << r.counter_gas_used << ',' << r.dust_spent << '\n';
  }
  return out.str();
}

void write_report(const MetricsReport& rep) {
  if (!rep.config.report_path.empty()) write_file(rep.config.report_path, report_json(rep));
  if (!rep.config.csv_path.empty()) write_file(rep.config.csv_path, report_csv(rep));
}

std::string fpr_json(const FprRecord& r) {
  json profiles = json::array();
  for (const auto& p : r.profiles)
    profiles.push_back({{"name", p.name},
                        {"total", p.total},
                        {"flagged", p.flagged},
                        {"unknown_bots", p.unknown_bots},
                        {"flagged_unexpected", p.flagged_unexpected},
                        {"fpr", p.fpr},
                        {"accuracy", p.accuracy}});
  json out{{"format", "flashguard-fpr/1"},
           {"total", r.total},
           {"flagged", r.flagged},
           {"fpr", r.fpr},
           {"accuracy", r.accuracy},
           {"profiles", profiles}};
  return out.dump(1) + "\n";
}

std::string bench_json(const BenchRecord& r) {
  json out{{"format", "flashguard-bench/1"},
           {"txs", r.txs},
           {"repetitions", r.repetitions},
           {"flagged_prefilter", r.flagged_prefilter},
           {"flagged_full", r.flagged_full},
           {"flagged_sets_equal", r.flagged_sets_equal},
           {"timing",
            {{"mean_us_prefilter", r.mean_us_prefilter},
             {"mean_us_full", r.mean_us_full},
             {"reduction_percent", r.reduction_percent}}}};
  return out.dump(1) + "\n";
}

FprConfig parse_corpus_config(std::string_view text, const std::string& source) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, source + ": " + e.what());
  }
  FprConfig c;
  try {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "expected object");
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("count_per_profile")) c.count_per_profile = j.at("count_per_profile").get<std::size_t>();
    if (j.contains("exclusions")) {
      auto e = j.at("exclusions").get<std::string>();
      if (e == "none") c.exclusions = ExclusionPolicy::None;
      else if (e == "known") c.exclusions = ExclusionPolicy::KnownBots;
      else if (e == "all") c.exclusions = ExclusionPolicy::AllBots;
      else throw Error(ErrorCode::ParseError, "exclusions: expected none, known or all");
    }
    if (j.contains("detector")) c.mode = parse_detector_mode(j.at("detector").get<std::string>(), source);
    if (j.contains("profiles")) {
      auto defaults = scenarios::default_profiles();
      auto find = [&](const std::string& name) {
        for (const auto& p : defaults)
          if (p.name == name) return p;
        scenarios::TrafficProfile p;
        p.name = name;
        return p;
      };
      c.profiles.clear();
      std::size_t i = 0;
      for (const auto& item : j.at("profiles")) {
        std::string where = "profiles[" + std::to_string(i++) + "]";
        if (item.is_string()) {
          c.profiles.push_back(find(item.get<std::string>()));
          continue;
        }
        if (!item.is_object() || !item.contains("name"))
          throw Error(ErrorCode::ParseError, where + ": expected a name or an object with a name");
        auto p = find(item.at("name").get<std::string>());
        auto ppm = [&](const char* key, std::uint32_t& out) {
          if (item.contains(key)) out = item.at(key).get<std::uint32_t>();
        };
        ppm("native_ppm", p.native_ppm);
        ppm("transfer_ppm", p.transfer_ppm);
        ppm("approve_ppm", p.approve_ppm);
        ppm("swap_ppm", p.swap_ppm);
        ppm("withdraw_ppm", p.withdraw_ppm);
        ppm("known_bot_ppm", p.known_bot_ppm);
        ppm("loan_without_approval_ppm", p.loan_without_approval_ppm);
        ppm("unknown_bot_ppm", p.unknown_bot_ppm);
        c.profiles.push_back(p);
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, source + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw Error(ErrorCode::ParseError, source + ": " + e.what());
    throw;
  }
  return c;
}

FprConfig load_corpus_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open corpus config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_corpus_config(ss.str(), path);
}

}  // namespace flashguard::harness
