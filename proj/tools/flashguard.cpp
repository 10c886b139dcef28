#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "flashguard/harness.hpp"
#include "flashguard/scenario_io.hpp"

namespace fg = flashguard;
namespace h = flashguard::harness;

namespace {

int config_error(const std::string& what) {
  std::cerr << "flashguard: " << what << '\n';
  return 2;
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw fg::Error(fg::ErrorCode::ConfigError, "cannot write " + path);
  out << text;
}

// A corpus argument is either a corpus config or a scenario file carrying traffic.
std::vector<fg::scenarios::ScenarioSpec> load_corpus(const std::string& path, h::FprConfig* config) {
  std::ifstream in(path);
  if (!in) throw fg::Error(fg::ErrorCode::ConfigError, "cannot open corpus " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  if (text.find("\"traffic\"") != std::string::npos) return {fg::scenario_io::from_json(text, path)};
  auto c = h::parse_corpus_config(text, path);
  if (config) *config = c;
  return h::build_corpora(c);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flash-loan attack detection and disruption simulator"};
  app.require_subcommand(1);

  h::RunConfig rc;
  std::string mode = "disrupt";
  std::string det = "scan";
  auto* run = app.add_subcommand("run", "Run scenarios on the virtual clock");
  run->add_option("--scenario", rc.scenario_paths, "Scenario JSON or builtin:{hedgey,presets,unseen,<preset>}")
      ->required()
      ->envname("FGUARD_SCENARIO");
  run->add_option("--mode", mode, "baseline, detect or disrupt")->envname("FGUARD_MODE");
  run->add_option("--detector", det, "scan or trace")->envname("FGUARD_DETECTOR");
  run->add_option("--seed", rc.seed)->envname("FGUARD_SEED");
  run->add_option("--block-interval-ms", rc.block_interval_ms, "0 uses the chain profile")
      ->envname("FGUARD_BLOCK_INTERVAL_MS");
  run->add_option("--grace-ms", rc.sealing_grace_ms)->envname("FGUARD_GRACE_MS");
  run->add_option("--verdict-delay-ms", rc.verdict_delay_ms)->envname("FGUARD_VERDICT_DELAY_MS");
  run->add_option("--relay-latency-ms", rc.relay_latency_ms)->envname("FGUARD_RELAY_LATENCY_MS");
  run->add_option("--detector-cost-ms", rc.detector_cost_ms)->envname("FGUARD_DETECTOR_COST_MS");
  run->add_flag("--wall-clock", rc.wall_clock, "Add measured detection latency to virtual time")
      ->envname("FGUARD_WALL_CLOCK");
  bool no_prefilter = false;
  run->add_flag("--no-prefilter", no_prefilter)->envname("FGUARD_NO_PREFILTER");
  run->add_option("--signatures", rc.signatures_path, "Signature database file (class,selector,signature,provider)")
      ->envname("FGUARD_SIGNATURES");
  run->add_option("--report", rc.report_path)->envname("FGUARD_REPORT");
  run->add_option("--csv", rc.csv_path)->envname("FGUARD_CSV");

  std::string corpus, fpr_report;
  auto* fpr = app.add_subcommand("fpr", "Measure the false-positive rate on benign traffic");
  fpr->add_option("--corpus", corpus, "Corpus config or scenario JSON")->required()->envname("FGUARD_CORPUS");
  fpr->add_option("--report", fpr_report)->envname("FGUARD_REPORT");

  std::string bench_corpus, bench_report;
  int reps = 5;
  auto* bench = app.add_subcommand("bench", "Compare prefiltered and full classification");
  bench->add_option("--corpus", bench_corpus)->required()->envname("FGUARD_CORPUS");
  bench->add_option("--repetitions", reps)->envname("FGUARD_REPETITIONS");
  bench->add_option("--report", bench_report)->envname("FGUARD_REPORT");

  std::string export_dir;
  std::uint64_t export_seed = 1;
  auto* exp = app.add_subcommand("export", "Write the built-in scenarios as JSON files");
  exp->add_option("dir", export_dir)->required();
  exp->add_option("--seed", export_seed)->envname("FGUARD_SEED");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      rc.mode = h::parse_run_mode(mode);
      if (det == "scan")
        rc.detector_mode = fg::detector::Mode::Scan;
      else if (det == "trace")
        rc.detector_mode = fg::detector::Mode::Trace;
      else
        return config_error("unknown detector '" + det + "'");
      rc.prefilter = !no_prefilter;
      auto rep = h::run(rc);
      for (const auto& r : rep.scenarios) {
        std::cout << r.name << ": detected=" << r.detected << " disrupted=" << r.disrupted
                  << " status=" << r.attack_status << " loss=" << r.loss << " rescued=" << r.rescued << '\n';
        for (const auto& m : r.mismatches) std::cout << "  mismatch: " << m << '\n';
      }
      std::cout << "total rescued " << rep.aggregate.total_rescued << ", mismatched " << rep.aggregate.mismatched
                << '/' << rep.aggregate.scenarios << '\n';
      return h::exit_code(rep);
    }
    if (*fpr) {
      h::FprConfig c;
      auto corpora = load_corpus(corpus, &c);
      h::FprRecord rec;
      for (const auto& s : corpora) {
        auto r = h::evaluate_corpus(s, c.mode);
        rec.total += r.total;
        rec.flagged += r.flagged;
        rec.profiles.push_back(r);
      }
      if (rec.total) {
        rec.fpr = static_cast<double>(rec.flagged) / static_cast<double>(rec.total);
        rec.accuracy = 1.0 - rec.fpr;
      }
      write_or_print(fpr_report, h::fpr_json(rec));
      return 0;
    }
    if (*bench) {
      auto corpora = load_corpus(bench_corpus, nullptr);
      fg::scenarios::ScenarioSpec merged = corpora.front();
      for (std::size_t i = 1; i < corpora.size(); ++i) {
        merged.traffic.insert(merged.traffic.end(), corpora[i].traffic.begin(), corpora[i].traffic.end());
        for (const auto& [a, reason] : corpora[i].exclusions.entries()) merged.exclusions.add(a, reason);
      }
      write_or_print(bench_report, h::bench_json(h::bench_prefilter(merged, reps)));
      return 0;
    }
    if (*exp) {
      std::filesystem::create_directories(export_dir);
      auto put = [&](const fg::scenarios::ScenarioSpec& s) {
        auto path = std::filesystem::path(export_dir) / (s.name + ".json");
        fg::scenario_io::save(s, path.string());
        std::cout << path.string() << '\n';
      };
      put(fg::scenarios::build_hedgey_scenario());
      for (const auto& s : fg::scenarios::build_all_presets(export_seed)) put(s);
      for (const auto& s : fg::scenarios::build_unseen_scenarios()) put(s);
      return 0;
    }
  } catch (const fg::Error& e) {
    if (e.code() == fg::ErrorCode::ConfigError || e.code() == fg::ErrorCode::ParseError) return config_error(e.what());
    std::cerr << "flashguard: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "flashguard: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
