#include <set>

#include "flashguard/scenarios.hpp"

namespace flashguard::scenarios {

namespace sel = calldata::selectors;

ShapeCounts measure_shape(const chainsim::ExecutionTrace& trace, const WorldState& world, const Address& origin) {
  ShapeCounts out;
  std::set<Address> entities;
  std::set<Address> tokens;
  auto consider = [&](const Address& a) {
    if (a == origin || a.is_zero() || !world.exists(a)) return;
    if (world.is_token(a))
      tokens.insert(a);
    else
      entities.insert(a);
  };

  for (const auto& c : trace.internal_calls) {
    if (c.depth >= 1) {
      ++out.internal_tx_count;
      consider(c.caller);
      consider(c.callee);
    }
    if (c.selector == sel::approve || c.selector == sel::allowance) ++out.data_dependencies;
    for (const auto& w : c.args) {
      Address a;
      if (Address::from_word(w, a)) consider(a);
    }
  }
  for (const auto& f : trace.money_flows) {
    tokens.insert(f.token);
    consider(f.from);
    consider(f.to);
  }
  out.money_flow_events = trace.money_flows.size();
  out.entity_count = entities.size();
  out.token_count = tokens.size();
  return out;
}

bool matches(const ShapeCounts& c, const ScenarioShape& s) {
  return c.internal_tx_count == s.internal_tx_count && c.entity_count == s.entity_count &&
         c.data_dependencies == s.data_dependencies && c.money_flow_events == s.money_flow_events &&
         c.token_count == s.token_count;
}

}  // namespace flashguard::scenarios
