#include "flashguard/scenario_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace flashguard::scenario_io {

namespace {

using json = nlohmann::ordered_json;
using namespace chainsim;
using namespace scenarios;

// ---- writing ----

json addr_json(const AddrExpr& e) {
  switch (e.kind) {
    case AddrExpr::Kind::Literal: return e.literal.hex();
    case AddrExpr::Kind::Self: return "self";
    case AddrExpr::Kind::Caller: return "caller";
    case AddrExpr::Kind::Origin: return "origin";
    case AddrExpr::Kind::Arg: return json{{"arg", e.arg}};
  }
  return nullptr;
}

json value_json(const ValueExpr& v) {
  using K = ValueExpr::Kind;
  switch (v.kind) {
    case K::Const: return json{{"const", amount_to_string(v.constant)}};
    case K::Arg: return json{{"arg", v.arg}};
    case K::Balance: return json{{"balance", {{"token", addr_json(v.token)}, {"holder", addr_json(v.a)}}}};
    case K::Allowance:
      return json{{"allowance",
                   {{"token", addr_json(v.token)}, {"owner", addr_json(v.a)}, {"spender", addr_json(v.b)}}}};
    case K::Storage: {
      json s{{"slot", v.slot}};
      if (!v.operands.empty()) s["key"] = value_json(v.operands[0]);
      return json{{"storage", s}};
    }
    case K::Add: return json{{"add", {value_json(v.operands.at(0)), value_json(v.operands.at(1))}}};
    case K::Sub: return json{{"sub", {value_json(v.operands.at(0)), value_json(v.operands.at(1))}}};
    case K::AddressOf: return json{{"address_of", addr_json(v.a)}};
  }
  return nullptr;
}

const char* op_name(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "eq";
    case CmpOp::Ne: return "ne";
    case CmpOp::Lt: return "lt";
    case CmpOp::Le: return "le";
    case CmpOp::Gt: return "gt";
    case CmpOp::Ge: return "ge";
  }
  return "eq";
}

json cond_json(const Condition& c) { return {{"lhs", value_json(c.lhs)}, {"op", op_name(c.op)}, {"rhs", value_json(c.rhs)}}; }

json effect_json(const Effect& e) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, CallEffect>) {
          json args = json::array();
          for (const auto& a : x.args) args.push_back(value_json(a));
          return {{"call",
                   {{"target", addr_json(x.target)},
                    {"selector", x.selector.hex()},
                    {"args", args},
                    {"check_return", x.check_return}}}};
        } else if constexpr (std::is_same_v<T, ForwardEffect>) {
          return {{"forward", x.target_arg_offset}};
        } else if constexpr (std::is_same_v<T, StoreEffect>) {
          json s{{"slot", x.slot}, {"value", value_json(x.value)}};
          if (x.key) s["key"] = value_json(*x.key);
          return {{"store", s}};
        } else if constexpr (std::is_same_v<T, MintEffect>) {
          return {{"mint", {{"token", addr_json(x.token)}, {"account", addr_json(x.account)}, {"amount", value_json(x.amount)}}}};
        } else if constexpr (std::is_same_v<T, BurnEffect>) {
          return {{"burn", {{"token", addr_json(x.token)}, {"account", addr_json(x.account)}, {"amount", value_json(x.amount)}}}};
        } else {
          return {{"revert", x.reason}};
        }
      },
      e);
}

json program_json(const ContractProgram& p) {
  json handlers = json::array();
  for (const auto& [sel, steps] : p.handlers) {
    json js = json::array();
    for (const auto& s : steps) {
      json step{{"name", s.name}};
      if (s.when) step["when"] = cond_json(*s.when);
      json req = json::array();
      for (const auto& c : s.require) req.push_back(cond_json(c));
      step["require"] = req;
      json eff = json::array();
      for (const auto& e : s.effects) eff.push_back(effect_json(e));
      step["effects"] = eff;
      step["gas"] = s.gas_cost;
      js.push_back(step);
    }
    handlers.push_back({{"selector", sel.hex()}, {"steps", js}});
  }
  return {{"name", p.name}, {"handlers", handlers}};
}

const char* kind_name(AccountKind k) { return k == AccountKind::Contract ? "contract" : "eoa"; }

json world_json(const WorldState& w) {
  json accounts = json::array();
  for (const auto& [a, acct] : w.accounts)
    accounts.push_back({{"address", a.hex()},
                        {"native", amount_to_string(acct.native)},
                        {"nonce", acct.nonce},
                        {"kind", kind_name(acct.kind)}});
  json tokens = json::array();
  for (const auto& [a, t] : w.tokens) {
    json balances = json::array();
    for (const auto& [h, v] : t.balances) balances.push_back({h.hex(), amount_to_string(v)});
    json allowances = json::array();
    for (const auto& [k, v] : t.allowances) allowances.push_back({k.first.hex(), k.second.hex(), amount_to_string(v)});
    tokens.push_back({{"address", a.hex()},
                      {"symbol", t.symbol},
                      {"returns_false_on_failure", t.returns_false_on_failure},
                      {"total_supply", amount_to_string(t.total_supply)},
                      {"balances", balances},
                      {"allowances", allowances}});
  }
  json contracts = json::array();
  for (const auto& [a, c] : w.contracts) {
    json storage = json::object();
    for (const auto& [k, v] : c.storage) storage[k] = amount_to_string(v);
    contracts.push_back({{"address", a.hex()}, {"program", program_json(*c.program)}, {"storage", storage}});
  }
  json providers = json::array();
  for (const auto& [a, p] : w.providers) {
    json liq = json::array();
    for (const auto& [t, v] : p.genesis_liquidity) liq.push_back({t.hex(), amount_to_string(v)});
    providers.push_back({{"address", a.hex()},
                         {"name", p.name},
                         {"loan_selector", p.loan_selector.hex()},
                         {"callback_selector", p.callback_selector.hex()},
                         {"fee_numerator", p.fee_numerator},
                         {"fee_denominator", p.fee_denominator},
                         {"genesis_liquidity", liq}});
  }
  return {{"block_height", w.block_height},
          {"accounts", accounts},
          {"tokens", tokens},
          {"contracts", contracts},
          {"providers", providers}};
}

json gas_json(const GasSchedule& g) {
  return {{"intrinsic", g.intrinsic},         {"call", g.call},         {"token_transfer", g.token_transfer},
          {"token_approve", g.token_approve}, {"token_view", g.token_view}, {"flash_loan", g.flash_loan},
          {"storage_write", g.storage_write}};
}

json shape_json(const ScenarioShape& s) {
  return {{"txs", s.internal_tx_count}, {"entities", s.entity_count},   {"dd", s.data_dependencies},
          {"mf", s.money_flow_events},  {"tk", s.token_count},          {"loss", amount_to_string(s.expected_loss)}};
}

// ---- reading ----

std::size_t line_of(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

class Reader {
 public:
  Reader(const json& j, std::string path, const std::string& source) : j_(j), path_(std::move(path)), source_(source) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::ParseError, source_ + ": " + (path_.empty() ? "<root>" : path_) + ": " + what);
  }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }

  Reader at(const char* key) const {
    if (!j_.is_object()) fail("expected object");
    auto it = j_.find(key);
    if (it == j_.end()) fail(std::string("missing field '") + key + "'");
    return Reader(*it, path_.empty() ? key : path_ + "." + key, source_);
  }

  std::vector<Reader> items() const {
    if (!j_.is_array()) fail("expected array");
    std::vector<Reader> out;
    for (std::size_t i = 0; i < j_.size(); ++i) out.emplace_back(j_[i], path_ + "[" + std::to_string(i) + "]", source_);
    return out;
  }

  std::vector<std::pair<std::string, Reader>> members() const {
    if (!j_.is_object()) fail("expected object");
    std::vector<std::pair<std::string, Reader>> out;
    for (auto it = j_.begin(); it != j_.end(); ++it) out.push_back({it.key(), Reader(it.value(), path_ + "." + it.key(), source_)});
    return out;
  }

  std::string str() const {
    if (!j_.is_string()) fail("expected string");
    return j_.get<std::string>();
  }
  std::uint64_t u64() const {
    if (!j_.is_number_unsigned()) fail("expected unsigned integer");
    return j_.get<std::uint64_t>();
  }
  std::int64_t i64() const {
    if (!j_.is_number_integer()) fail("expected integer");
    return j_.get<std::int64_t>();
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected boolean");
    return j_.get<bool>();
  }
  Amount amount() const {
    std::string s = str();
    try {
      return parse_amount(s);
    } catch (const std::exception& e) {
      fail(std::string("expected decimal amount: ") + e.what());
    }
  }
  Address address(AccountKind kind = AccountKind::EOA) const {
    std::string s = str();
    try {
      return Address::from_hex(s, kind);
    } catch (const std::exception& e) {
      fail(std::string("expected address: ") + e.what());
    }
  }
  Selector selector() const {
    std::string s = str();
    try {
      return Selector::from_hex(s);
    } catch (const std::exception& e) {
      fail(std::string("expected selector: ") + e.what());
    }
  }
  Bytes bytes() const {
    std::string s = str();
    try {
      return from_hex(s);
    } catch (const std::exception& e) {
      fail(std::string("expected hex bytes: ") + e.what());
    }
  }
  const json& raw() const { return j_; }

 private:
  const json& j_;
  std::string path_;
  const std::string& source_;
};

AddrExpr read_addr(const Reader& r) {
  if (r.raw().is_object()) return AddrExpr::arg_at(r.at("arg").u64());
  std::string s = r.str();
  if (s == "self") return AddrExpr::self();
  if (s == "caller") return AddrExpr::caller();
  if (s == "origin") return AddrExpr::origin();
  return AddrExpr::lit(r.address());
}

ValueExpr read_value(const Reader& r) {
  if (r.has("const")) return ValueExpr::constant_of(r.at("const").amount());
  if (r.has("arg")) return ValueExpr::arg_at(r.at("arg").u64());
  if (r.has("balance")) {
    auto b = r.at("balance");
    return ValueExpr::balance(read_addr(b.at("token")), read_addr(b.at("holder")));
  }
  if (r.has("allowance")) {
    auto b = r.at("allowance");
    return ValueExpr::allowance(read_addr(b.at("token")), read_addr(b.at("owner")), read_addr(b.at("spender")));
  }
  if (r.has("storage")) {
    auto s = r.at("storage");
    if (s.has("key")) return ValueExpr::storage_at(s.at("slot").str(), read_value(s.at("key")));
    return ValueExpr::storage(s.at("slot").str());
  }
  for (const char* op : {"add", "sub"}) {
    if (!r.has(op)) continue;
    auto parts = r.at(op).items();
    if (parts.size() != 2) r.at(op).fail("expected two operands");
    auto x = read_value(parts[0]);
    auto y = read_value(parts[1]);
    return op[0] == 'a' ? ValueExpr::add(x, y) : ValueExpr::sub(x, y);
  }
  if (r.has("address_of")) return ValueExpr::address_of(read_addr(r.at("address_of")));
  r.fail("unknown value expression");
}

CmpOp read_op(const Reader& r) {
  std::string s = r.str();
  for (auto op : {CmpOp::Eq, CmpOp::Ne, CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge})
    if (s == op_name(op)) return op;
  r.fail("unknown comparison '" + s + "'");
}

Condition read_cond(const Reader& r) { return {read_value(r.at("lhs")), read_op(r.at("op")), read_value(r.at("rhs"))}; }

Effect read_effect(const Reader& r) {
  if (r.has("call")) {
    auto c = r.at("call");
    CallEffect e;
    e.target = read_addr(c.at("target"));
    e.selector = c.at("selector").selector();
    for (const auto& a : c.at("args").items()) e.args.push_back(read_value(a));
    if (c.has("check_return")) e.check_return = c.at("check_return").boolean();
    return e;
  }
  if (r.has("forward")) return ForwardEffect{r.at("forward").u64()};
  if (r.has("store")) {
    auto s = r.at("store");
    StoreEffect e;
    e.slot = s.at("slot").str();
    if (s.has("key")) e.key = read_value(s.at("key"));
    e.value = read_value(s.at("value"));
    return e;
  }
  if (r.has("mint")) {
    auto m = r.at("mint");
    return MintEffect{read_addr(m.at("token")), read_addr(m.at("account")), read_value(m.at("amount"))};
  }
  if (r.has("burn")) {
    auto m = r.at("burn");
    return BurnEffect{read_addr(m.at("token")), read_addr(m.at("account")), read_value(m.at("amount"))};
  }
  if (r.has("revert")) return RevertEffect{r.at("revert").str()};
  r.fail("unknown effect");
}

ContractProgram read_program(const Reader& r) {
  ContractProgram p;
  p.name = r.at("name").str();
  for (const auto& h : r.at("handlers").items()) {
    Selector sel = h.at("selector").selector();
    std::vector<Step> steps;
    for (const auto& s : h.at("steps").items()) {
      Step step;
      step.name = s.at("name").str();
      if (s.has("when")) step.when = read_cond(s.at("when"));
      if (s.has("require"))
        for (const auto& c : s.at("require").items()) step.require.push_back(read_cond(c));
      if (s.has("effects"))
        for (const auto& e : s.at("effects").items()) step.effects.push_back(read_effect(e));
      if (s.has("gas")) step.gas_cost = s.at("gas").u64();
      steps.push_back(std::move(step));
    }
    if (!p.handlers.emplace(sel, std::move(steps)).second) h.fail("duplicate handler " + sel.hex());
  }
  return p;
}

AccountKind read_kind(const Reader& r) {
  std::string s = r.str();
  if (s == "eoa") return AccountKind::EOA;
  if (s == "contract") return AccountKind::Contract;
  r.fail("unknown account kind '" + s + "'");
}

WorldState read_world(const Reader& r) {
  WorldState w;
  if (r.has("block_height")) w.block_height = r.at("block_height").u64();
  for (const auto& a : r.at("accounts").items()) {
    AccountKind kind = a.has("kind") ? read_kind(a.at("kind")) : AccountKind::EOA;
    auto& acct = w.add_account(a.at("address").address(kind), a.has("native") ? a.at("native").amount() : Amount(0));
    if (a.has("nonce")) acct.nonce = a.at("nonce").u64();
    acct.kind = kind;
  }
  for (const auto& t : r.at("tokens").items()) {
    Address id = t.at("address").address(AccountKind::Contract);
    bool lenient = t.has("returns_false_on_failure") && t.at("returns_false_on_failure").boolean();
    auto& ledger = w.add_token(id, t.at("symbol").str(), lenient);
    for (const auto& b : t.at("balances").items()) {
      auto pair = b.items();
      if (pair.size() != 2) b.fail("expected [holder, amount]");
      Amount v = pair[1].amount();
      if (v != 0) ledger.balances[pair[0].address()] = v;
      ledger.total_supply += v;
    }
    for (const auto& b : t.at("allowances").items()) {
      auto trip = b.items();
      if (trip.size() != 3) b.fail("expected [owner, spender, amount]");
      Amount v = trip[2].amount();
      if (v != 0) ledger.allowances[{trip[0].address(), trip[1].address()}] = v;
    }
    if (t.has("total_supply") && t.at("total_supply").amount() != ledger.total_supply)
      t.at("total_supply").fail("does not equal the sum of balances");
  }
  for (const auto& c : r.at("contracts").items()) {
    Address a = c.at("address").address(AccountKind::Contract);
    auto& acct = w.add_contract(a, read_program(c.at("program")));
    if (c.has("storage"))
      for (const auto& [k, v] : c.at("storage").members()) acct.storage[k] = v.amount();
  }
  for (const auto& p : r.at("providers").items()) {
    FlashLoanProvider fp;
    fp.address = p.at("address").address(AccountKind::Contract);
    fp.name = p.at("name").str();
    fp.loan_selector = p.at("loan_selector").selector();
    if (p.has("callback_selector")) fp.callback_selector = p.at("callback_selector").selector();
    if (p.has("fee_numerator")) fp.fee_numerator = p.at("fee_numerator").u64();
    if (p.has("fee_denominator")) fp.fee_denominator = p.at("fee_denominator").u64();
    if (fp.fee_denominator == 0) p.at("fee_denominator").fail("must be positive");
    for (const auto& l : p.at("genesis_liquidity").items()) {
      auto pair = l.items();
      if (pair.size() != 2) l.fail("expected [token, amount]");
      fp.genesis_liquidity[pair[0].address(AccountKind::Contract)] = pair[1].amount();
    }
    w.add_provider(fp);
  }
  return w;
}

GasSchedule read_gas(const Reader& r) {
  GasSchedule g;
  auto field = [&](const char* k, Gas& out) {
    if (r.has(k)) out = r.at(k).u64();
  };
  field("intrinsic", g.intrinsic);
  field("call", g.call);
  field("token_transfer", g.token_transfer);
  field("token_approve", g.token_approve);
  field("token_view", g.token_view);
  field("flash_loan", g.flash_loan);
  field("storage_write", g.storage_write);
  return g;
}

}  // namespace

std::string to_json(const ScenarioSpec& spec, int indent) {
  const auto& r = spec.roles;
  json roles{{"attacker_eoa", r.attacker_eoa.hex()},
             {"attacker_contract", r.attacker_contract.hex()},
             {"victim", r.victim.hex()},
             {"provider", r.provider.hex()},
             {"guardian",
              {{"operator", r.guardian.operator_eoa.hex()},
               {"contract", r.guardian.contract.hex()},
               {"dust", amount_to_string(r.guardian.dust)},
               {"gas_price", r.guardian.gas_price},
               {"dry_run_gas", r.guardian.dry_run_gas},
               {"gas_margin_percent", r.guardian.gas_margin_percent}}}};
  json traffic = json::array();
  for (const auto& t : spec.traffic) {
    traffic.push_back({{"at_ms", t.at_ms},
                       {"role", to_string(t.role)},
                       {"label", t.label},
                       {"tx",
                        {{"hash", t.tx.hash.hex()},
                         {"from", t.tx.from.hex()},
                         {"nonce", t.tx.nonce},
                         {"to", t.tx.to.hex()},
                         {"gas_price", t.tx.gas_price},
                         {"gas_limit", t.tx.gas_limit},
                         {"value", amount_to_string(t.tx.value)},
                         {"input", to_hex(t.tx.input)}}}});
  }
  json exclusions = json::array();
  for (const auto& [a, reason] : spec.exclusions.entries()) exclusions.push_back({{"address", a.hex()}, {"reason", reason}});
  json subs = json::array();
  for (const auto& [v, e] : spec.subscriptions.entries())
    subs.push_back({{"victim", v.hex()}, {"token", e.token.hex()}, {"allowance", amount_to_string(e.allowance)}});
  json expected{{"detected", spec.expected.detected},
                {"disrupted_absd", spec.expected.disrupted_absd},
                {"disrupted_sfsd", spec.expected.disrupted_sfsd},
                {"loss_without_guard", amount_to_string(spec.expected.loss_without_guard)}};
  if (spec.expected.shape) expected["shape"] = shape_json(*spec.expected.shape);

  json out{{"format", "flashguard-scenario/1"},
           {"name", spec.name},
           {"description", spec.description},
           {"chain_profile",
            {{"name", spec.chain_profile.name},
             {"block_interval_ms", spec.chain_profile.block_interval_ms},
             {"block_capacity", spec.chain_profile.block_capacity},
             {"gas", gas_json(spec.chain_profile.gas)}}},
           {"genesis", {{"world", world_json(spec.genesis)}, {"roles", roles}}},
           {"traffic", traffic},
           {"exclusions", exclusions},
           {"subscriptions", subs},
           {"expected", expected}};
  return out.dump(indent);
}

ScenarioSpec from_json(std::string_view text, const std::string& source) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError,
                source + ": line " + std::to_string(line_of(text, e.byte == 0 ? 0 : e.byte - 1)) + ": " + e.what());
  }
  Reader r(root, "", source);
  if (r.has("format") && r.at("format").str() != "flashguard-scenario/1")
    r.at("format").fail("unsupported format '" + r.at("format").str() + "'");

  ScenarioSpec spec;
  spec.name = r.at("name").str();
  if (r.has("description")) spec.description = r.at("description").str();

  auto cp = r.at("chain_profile");
  try {
    spec.chain_profile = chain_profile(cp.at("name").str());
  } catch (const Error& e) {
    cp.at("name").fail(e.what());
  }
  if (cp.has("block_interval_ms")) spec.chain_profile.block_interval_ms = cp.at("block_interval_ms").i64();
  if (spec.chain_profile.block_interval_ms <= 0) cp.at("block_interval_ms").fail("must be positive");
  if (cp.has("block_capacity")) spec.chain_profile.block_capacity = cp.at("block_capacity").u64();
  if (spec.chain_profile.block_capacity == 0) cp.at("block_capacity").fail("must be positive");
  if (cp.has("gas")) spec.chain_profile.gas = read_gas(cp.at("gas"));

  auto gen = r.at("genesis");
  spec.genesis = read_world(gen.at("world"));
  auto ro = gen.at("roles");
  auto opt_addr = [&](const char* k, AccountKind kind) { return ro.has(k) ? ro.at(k).address(kind) : Address{}; };
  spec.roles.attacker_eoa = opt_addr("attacker_eoa", AccountKind::EOA);
  spec.roles.attacker_contract = opt_addr("attacker_contract", AccountKind::Contract);
  spec.roles.victim = opt_addr("victim", AccountKind::Contract);
  spec.roles.provider = opt_addr("provider", AccountKind::Contract);
  auto g = ro.at("guardian");
  spec.roles.guardian.operator_eoa = g.at("operator").address();
  spec.roles.guardian.contract = g.at("contract").address(AccountKind::Contract);
  if (!spec.genesis.contracts.count(spec.roles.guardian.contract))
    g.at("contract").fail("guardian contract is not deployed in genesis");
  if (g.has("dust")) spec.roles.guardian.dust = g.at("dust").amount();
  if (spec.roles.guardian.dust == 0) g.at("dust").fail("must be positive");
  if (g.has("gas_price")) spec.roles.guardian.gas_price = g.at("gas_price").u64();
  if (g.has("dry_run_gas")) spec.roles.guardian.dry_run_gas = g.at("dry_run_gas").u64();
  if (g.has("gas_margin_percent"))
    spec.roles.guardian.gas_margin_percent = static_cast<std::uint32_t>(g.at("gas_margin_percent").u64());

  for (const auto& t : r.at("traffic").items()) {
    TimedTransaction tt;
    tt.at_ms = t.at("at_ms").i64();
    if (tt.at_ms < 0) t.at("at_ms").fail("must be non-negative");
    try {
      tt.role = parse_role(t.at("role").str());
    } catch (const Error& e) {
      t.at("role").fail(e.what());
    }
    if (t.has("label")) tt.label = t.at("label").str();
    auto x = t.at("tx");
    Address from = x.at("from").address();
    std::uint64_t nonce = x.at("nonce").u64();
    tt.tx = make_transaction(from, nonce, x.at("to").address(), x.at("gas_price").u64(), x.at("gas_limit").u64(),
                             x.at("input").bytes(), x.has("value") ? x.at("value").amount() : Amount(0));
    if (x.has("hash") && x.at("hash").str() != tt.tx.hash.hex())
      x.at("hash").fail("does not match keccak(from, nonce)");
    spec.traffic.push_back(std::move(tt));
  }
  for (std::size_t i = 1; i < spec.traffic.size(); ++i)
    if (spec.traffic[i].at_ms < spec.traffic[i - 1].at_ms)
      r.at("traffic").items()[i].at("at_ms").fail("traffic must be sorted by at_ms");
  std::size_t attacks = 0;
  for (std::size_t i = 0; i < spec.traffic.size(); ++i)
    if (spec.traffic[i].role == TrafficRole::Attack && ++attacks > 1)
      r.at("traffic").items()[i].at("role").fail("at most one attack transaction per scenario");

  if (r.has("exclusions"))
    for (const auto& e : r.at("exclusions").items())
      spec.exclusions.add(e.at("address").address(), e.has("reason") ? e.at("reason").str() : std::string());
  if (r.has("subscriptions"))
    for (const auto& s : r.at("subscriptions").items())
      spec.subscriptions.subscribe(s.at("victim").address(AccountKind::Contract),
                                   s.at("token").address(AccountKind::Contract), s.at("allowance").amount());

  if (r.has("expected")) {
    auto e = r.at("expected");
    spec.expected.detected = e.at("detected").boolean();
    spec.expected.disrupted_absd = e.at("disrupted_absd").boolean();
    spec.expected.disrupted_sfsd = e.at("disrupted_sfsd").boolean();
    spec.expected.loss_without_guard = e.at("loss_without_guard").amount();
    if (e.has("shape")) {
      auto s = e.at("shape");
      spec.expected.shape = ScenarioShape{s.at("txs").u64(), s.at("entities").u64(), s.at("dd").u64(),
                                          s.at("mf").u64(),  s.at("tk").u64(),       s.at("loss").amount()};
    }
  }
  return spec;
}

void save(const ScenarioSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ConfigError, "cannot write " + path);
  out << to_json(spec) << '\n';
}

ScenarioSpec load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open scenario " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), path);
}

}  // namespace flashguard::scenario_io
