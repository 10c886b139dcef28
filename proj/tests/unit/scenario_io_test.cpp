#include <gtest/gtest.h>

#include "flashguard/scenario_io.hpp"
#include "json.hpp"

using namespace flashguard;
using namespace flashguard::scenarios;

namespace {

std::string parse_error(const std::string& text) {
  try {
    scenario_io::from_json(text, "case.json");
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    return e.what();
  }
  ADD_FAILURE() << "no error";
  return {};
}

}  // namespace

TEST(ScenarioIo, RoundTripPreservesEverything) {
  std::vector<ScenarioSpec> specs = {build_hedgey_scenario(), build_preset(historical_presets()[7])};
  for (auto& s : build_unseen_scenarios()) specs.push_back(std::move(s));
  for (const auto& spec : specs) {
    auto text = scenario_io::to_json(spec);
    auto back = scenario_io::from_json(text);
    EXPECT_EQ(back.name, spec.name);
    EXPECT_EQ(back.chain_profile, spec.chain_profile);
    EXPECT_EQ(back.genesis, spec.genesis) << spec.name;
    EXPECT_EQ(back.roles, spec.roles);
    EXPECT_EQ(back.traffic, spec.traffic);
    EXPECT_EQ(back.exclusions.entries(), spec.exclusions.entries());
    EXPECT_EQ(back.subscriptions, spec.subscriptions);
    EXPECT_EQ(back.expected, spec.expected);
    EXPECT_EQ(scenario_io::to_json(back), text);
  }
}

TEST(ScenarioIo, SyntaxErrorNamesLine) {
  auto msg = parse_error("{\n  \"format\": \"flashguard-scenario/1\",\n  \"name\": ,\n}");
  EXPECT_NE(msg.find("case.json"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
}

TEST(ScenarioIo, SchemaErrorNamesField) {
  auto j = nlohmann::json::parse(scenario_io::to_json(build_hedgey_scenario()));
  j["traffic"][0]["tx"]["gas_limit"] = "lots";
  auto msg = parse_error(j.dump());
  EXPECT_NE(msg.find("traffic[0].tx.gas_limit"), std::string::npos) << msg;

  j = nlohmann::json::parse(scenario_io::to_json(build_hedgey_scenario()));
  j.erase("roles");
  j["genesis"].erase("roles");
  msg = parse_error(j.dump());
  EXPECT_NE(msg.find("roles"), std::string::npos) << msg;

  j = nlohmann::json::parse(scenario_io::to_json(build_hedgey_scenario()));
  j["format"] = "other/2";
  msg = parse_error(j.dump());
  EXPECT_NE(msg.find("format"), std::string::npos) << msg;
}

TEST(ScenarioIo, RejectsInconsistentContent) {
  auto j = nlohmann::json::parse(scenario_io::to_json(build_hedgey_scenario()));
  j["traffic"][0]["tx"]["nonce"] = 999;
  auto msg = parse_error(j.dump());
  EXPECT_NE(msg.find("hash"), std::string::npos) << msg;

  j = nlohmann::json::parse(scenario_io::to_json(build_hedgey_scenario()));
  std::swap(j["traffic"][0], j["traffic"][j["traffic"].size() - 1]);
  msg = parse_error(j.dump());
  EXPECT_NE(msg.find("sorted"), std::string::npos) << msg;

  j = nlohmann::json::parse(scenario_io::to_json(build_hedgey_scenario()));
  j["traffic"][0]["role"] = "attack";
  msg = parse_error(j.dump());
  EXPECT_NE(msg.find("at most one attack"), std::string::npos) << msg;
}

TEST(ScenarioIo, GuardianMustBeDeployed) {
  auto spec = build_hedgey_scenario();
  spec.genesis.contracts.erase(spec.roles.guardian.contract);
  auto msg = parse_error(scenario_io::to_json(spec));
  EXPECT_NE(msg.find("genesis.roles.guardian.contract"), std::string::npos) << msg;
}
