/*
 * Copyright (c) 2026, the llab authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
*/

#include "llab/model.hpp"

#include <algorithm>
#include <utility>

namespace llab {

std::string Command::to_text() const {
  switch (kind) {
    case Kind::Epsilon: return "epsilon";
    case Kind::Return: return "return " + value.dump();
    case Kind::BeginTx: return "beginTx";
    case Kind::EndTx: return "endTx";
    case Kind::Read: return "read " + key;
    case Kind::Write: return "write " + key + " " + value.dump();
  }
  return "?";
}

JsonValue Command::to_json() const {
  switch (kind) {
    case Kind::Epsilon: return {{"kind", "epsilon"}};
    case Kind::Return: return {{"kind", "return"}, {"value", value}};
    case Kind::BeginTx: return {{"kind", "beginTx"}};
    case Kind::EndTx: return {{"kind", "endTx"}};
    case Kind::Read: return {{"kind", "read"}, {"key", key}};
    case Kind::Write: return {{"kind", "write"}, {"key", key}, {"value", value}};
  }
  return nullptr;
}

namespace {

ModelState idle_state() { return JsonValue{{"busy", false}}; }

bool is_idle(const ModelState& s) {
  return s.contains("busy") && s["busy"].is_boolean() && !s["busy"].get<bool>();
}

double num_or_zero(const JsonValue& v) {
  return v.is_number() ? v.get<double>() : 0.0;
}

JsonValue num_value(double d) {
  // Keep integral results integral so canonical output stays clean.
  long long i = static_cast<long long>(d);
  if (static_cast<double>(i) == d) return JsonValue(i);
  return JsonValue(d);
}

}  // namespace

// --- echo -------------------------------------------------------------------

FunctionModel model_echo() {
  FunctionModel m;
  m.name = "echo";
  m.initial = idle_state();
  m.initial_variants = {m.initial};
  m.recv = [](const JsonValue& v, const ModelState& s) -> std::optional<ModelState> {
    if (!is_idle(s)) return std::nullopt;
    return JsonValue{{"busy", true}, {"q", v}};
  };
  m.step = [](const ModelState& s) -> std::optional<StepResult> {
    if (is_idle(s)) return std::nullopt;
    return StepResult{idle_state(), Command::ret(s["q"])};
  };
  m.request_alphabet = {JsonValue("ping"), JsonValue{{"n", 1}}};
  m.state_enumeration.push_back(m.initial);
  for (const auto& v : m.request_alphabet)
    m.state_enumeration.push_back(JsonValue{{"busy", true}, {"q", v}});
  return m;
}

// --- auth-cache --------------------------------------------------------------

FunctionModel model_auth_cache(const std::map<std::string, std::string>& database) {
  if (database.empty()) throw ModelError("auth-cache: database must be nonempty");
  JsonValue db = JsonValue::object();
  for (const auto& [u, p] : database) db[u] = p;

  FunctionModel m;
  m.name = "auth-cache";
  m.initial = JsonValue{{"busy", false}, {"c", JsonValue::object()}, {"d", db}};
  m.initial_variants = {m.initial};
  m.recv = [](const JsonValue& v, const ModelState& s) -> std::optional<ModelState> {
    if (!is_idle(s)) return std::nullopt;
    if (!v.is_object() || !v.contains("user") || !v.contains("pass")) return std::nullopt;
    ModelState next = s;
    next["busy"] = true;
    next["q"] = JsonValue{v["user"], v["pass"]};
    return next;
  };
  m.step = [](const ModelState& s) -> std::optional<StepResult> {
    if (is_idle(s)) return std::nullopt;
    const std::string u = s["q"][0].get<std::string>();
    const JsonValue& p = s["q"][1];
    const JsonValue& c = s["c"];
    const JsonValue& d = s["d"];
    ModelState next = JsonValue{{"busy", false}, {"c", c}, {"d", d}};
    if (c.contains(u) && c[u] == p) {
      return StepResult{next, Command::ret(true)};
    }
    if (d.contains(u) && d[u] == p) {
      next["c"][u] = p;
      return StepResult{next, Command::ret(true)};
    }
    return StepResult{next, Command::ret(false)};
  };

  // Alphabet: every (user, password) combination over the database domain.
  std::vector<std::string> users, passwords;
  for (const auto& [u, p] : database) {
    users.push_back(u);
    if (std::find(passwords.begin(), passwords.end(), p) == passwords.end())
      passwords.push_back(p);
  }
  for (const auto& u : users)
    for (const auto& p : passwords)
      m.request_alphabet.push_back(JsonValue{{"user", u}, {"pass", p}});

  // Enumeration: query in {idle} + U*P, cache ranging over subsets of the
  // database pairs (caches are consistent by construction: c is a subset of D).
  std::vector<std::pair<std::string, std::string>> pairs(database.begin(), database.end());
  std::vector<JsonValue> caches;
  const std::size_t n = pairs.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    JsonValue c = JsonValue::object();
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) c[pairs[i].first] = pairs[i].second;
    caches.push_back(c);
  }
  for (const auto& c : caches) {
    m.state_enumeration.push_back(JsonValue{{"busy", false}, {"c", c}, {"d", db}});
    for (const auto& u : users)
      for (const auto& p : passwords)
        m.state_enumeration.push_back(
            JsonValue{{"busy", true}, {"q", JsonValue{u, p}}, {"c", c}, {"d", db}});
  }
  return m;
}

// --- process-id ---------------------------------------------------------------

FunctionModel model_process_id(const std::vector<long>& pool) {
  auto high = [](long tag) { return tag > 10000; };
  bool has_high = false, has_low = false;
  for (long t : pool) (high(t) ? has_high : has_low) = true;
  if (!has_high || !has_low)
    throw ModelError("process-id: pool needs tags on both sides of the threshold");

  FunctionModel m;
  m.name = "process-id";
  for (long t : pool)
    m.initial_variants.push_back(JsonValue{{"busy", false}, {"tag", t}});
  m.initial = m.initial_variants.front();
  m.recv = [](const JsonValue& v, const ModelState& s) -> std::optional<ModelState> {
    if (!is_idle(s)) return std::nullopt;
    ModelState next = s;
    next["busy"] = true;
    next["q"] = v;
    return next;
  };
  m.step = [high](const ModelState& s) -> std::optional<StepResult> {
    if (is_idle(s)) return std::nullopt;
    long tag = s["tag"].get<long>();
    ModelState next = JsonValue{{"busy", false}, {"tag", tag}};
    return StepResult{next, Command::ret(high(tag) ? "High process id" : "Low process id")};
  };
  m.request_alphabet = {JsonValue("ping")};
  for (long t : pool) {
    m.state_enumeration.push_back(JsonValue{{"busy", false}, {"tag", t}});
    for (const auto& v : m.request_alphabet)
      m.state_enumeration.push_back(JsonValue{{"busy", true}, {"tag", t}, {"q", v}});
  }
  return m;
}

// --- counter -------------------------------------------------------------------

FunctionModel model_counter() {
  FunctionModel m;
  m.name = "counter";
  m.initial = JsonValue{{"busy", false}, {"n", 0}};
  m.initial_variants = {m.initial};
  m.recv = [](const JsonValue& v, const ModelState& s) -> std::optional<ModelState> {
    if (!is_idle(s)) return std::nullopt;
    ModelState next = s;
    next["busy"] = true;
    next["q"] = v;
    return next;
  };
  m.step = [](const ModelState& s) -> std::optional<StepResult> {
    if (is_idle(s)) return std::nullopt;
    long n = s["n"].get<long>() + 1;
    return StepResult{JsonValue{{"busy", false}, {"n", n}}, Command::ret(n)};
  };
  m.request_alphabet = {JsonValue("ping")};
  for (int n = 0; n <= 4; ++n) {
    m.state_enumeration.push_back(JsonValue{{"busy", false}, {"n", n}});
    m.state_enumeration.push_back(JsonValue{{"busy", true}, {"n", n}, {"q", "ping"}});
  }
  return m;
}

// --- inc / double ----------------------------------------------------------------

namespace {

FunctionModel arith_model(std::string name, double factor, double addend) {
  FunctionModel m;
  m.name = std::move(name);
  m.initial = idle_state();
  m.initial_variants = {m.initial};
  m.recv = [](const JsonValue& v, const ModelState& s) -> std::optional<ModelState> {
    if (!is_idle(s)) return std::nullopt;
    return JsonValue{{"busy", true}, {"q", v}};
  };
  m.step = [factor, addend](const ModelState& s) -> std::optional<StepResult> {
    if (is_idle(s)) return std::nullopt;
    const JsonValue& q = s["q"];
    JsonValue out = q.is_number() ? num_value(q.get<double>() * factor + addend)
                                  : JsonValue{{"error", "not a number"}};
    return StepResult{idle_state(), Command::ret(out)};
  };
  m.request_alphabet = {JsonValue(1), JsonValue(3)};
  m.state_enumeration.push_back(m.initial);
  for (const auto& v : m.request_alphabet)
    m.state_enumeration.push_back(JsonValue{{"busy", true}, {"q", v}});
  return m;
}

}  // namespace

FunctionModel model_inc() { return arith_model("inc", 1.0, 1.0); }
FunctionModel model_double() { return arith_model("double", 2.0, 0.0); }

// --- bank (naive, Fig. 1 shape) ----------------------------------------------------

namespace {

FunctionModel bank_naive_model(const JsonValue& seed_accounts) {
  FunctionModel m;
  m.name = "bank-naive";
  JsonValue accounts = seed_accounts.is_object() ? seed_accounts : JsonValue::object();
  m.initial = JsonValue{{"busy", false}, {"accounts", accounts}};
  m.initial_variants = {m.initial};
  m.recv = [](const JsonValue& v, const ModelState& s) -> std::optional<ModelState> {
    if (!is_idle(s)) return std::nullopt;
    ModelState next = s;
    next["busy"] = true;
    next["q"] = v;
    return next;
  };
  m.step = [](const ModelState& s) -> std::optional<StepResult> {
    if (is_idle(s)) return std::nullopt;
    const JsonValue& q = s["q"];
    ModelState next = JsonValue{{"busy", false}, {"accounts", s["accounts"]}};
    if (!q.is_object() || !q.contains("type"))
      return StepResult{next, Command::ret(JsonValue{{"error", "malformed request"}})};
    const std::string type = q["type"].is_string() ? q["type"].get<std::string>() : "";
    JsonValue& accounts = next["accounts"];
    if (type == "deposit" && q.contains("name") && q.contains("value")) {
      accounts[q["name"].get<std::string>()] = q["value"];
      return StepResult{next, Command::ret(true)};
    }
    if (type == "transfer" && q.contains("from") && q.contains("to") && q.contains("amnt")) {
      const std::string from = q["from"].get<std::string>();
      const std::string to = q["to"].get<std::string>();
      const double amnt = num_or_zero(q["amnt"]);
      if (accounts.contains(from) && num_or_zero(accounts[from]) >= amnt) {
        accounts[to] = num_value(num_or_zero(accounts.contains(to) ? accounts[to] : JsonValue()) + amnt);
        accounts[from] = num_value(num_or_zero(accounts[from]) - amnt);
        return StepResult{next, Command::ret(true)};
      }
      return StepResult{next, Command::ret(false)};
    }
    return StepResult{next, Command::ret(JsonValue{{"error", "malformed request"}})};
  };
  m.request_alphabet = {
      JsonValue{{"type", "deposit"}, {"name", "a"}, {"value", 100}},
      JsonValue{{"type", "transfer"}, {"from", "a"}, {"to", "b"}, {"amnt", 40}},
  };
  return m;
}

// --- bank (transactional, idempotence protocol) -------------------------------
//
// Command sequence for a fresh request id:
//   beginTx; read(tid); read(accounts...); write(accounts...);
//   write(tid, result); endTx; return(result)
// and for a replayed id: beginTx; read(tid) -> hit; endTx; return(stored).
//
// Mutation switches carve out the checker fixtures.
struct BankTxOptions {
  bool write_request_key = true;   // false: never records the result under tid
  bool foreign_key = false;        // true: records under another request's id
  bool early_return = false;       // true: returns before endTx
  bool write_before_tx = false;    // true: emits a write before beginTx
};

std::string account_key(const JsonValue& name) { return "acct:" + name.get<std::string>(); }

std::string tx_id(const JsonValue& q) { return q["transId"].get<std::string>(); }

std::string foreign_tx_id(const std::string& tid) { return tid == "t1" ? "t2" : "t1"; }

FunctionModel bank_tx_model(std::string name, const BankTxOptions& opt) {
  FunctionModel m;
  m.name = std::move(name);
  m.initial = JsonValue{{"busy", false}};
  m.initial_variants = {m.initial};
  m.uses_store = true;
  m.request_key = [](const JsonValue& v) -> std::optional<std::string> {
    if (v.is_object() && v.contains("transId") && v["transId"].is_string())
      return v["transId"].get<std::string>();
    return std::nullopt;
  };

  m.recv = [opt](const JsonValue& v, const ModelState& s) -> std::optional<ModelState> {
    if (s.contains("phase")) {
      // Mid-transaction receives deliver read results.
      const std::string phase = s["phase"].get<std::string>();
      ModelState next = s;
      if (phase == "await_id") {
        if (v.is_null()) {
          next["phase"] = "fresh";
        } else {
          next["phase"] = "replay";
          next["stored"] = v;
        }
        return next;
      }
      if (phase == "await_to") {
        const JsonValue& q = s["req"];
        next["phase"] = "write_to";
        next["bal"] = num_value(num_or_zero(v) + num_or_zero(q["amount"]));
        return next;
      }
      if (phase == "await_from") {
        next["phase"] = "read_to";
        next["bal_from"] = num_value(num_or_zero(v));
        return next;
      }
      if (phase == "await_to2") {
        const JsonValue& q = s["req"];
        const double amount = num_or_zero(q["amount"]);
        if (num_or_zero(s["bal_from"]) >= amount) {
          next["phase"] = "write_from";
          next["bal_to"] = num_value(num_or_zero(v) + amount);
        } else {
          next["phase"] = "write_id";
          next["result"] = false;
        }
        return next;
      }
      return std::nullopt;
    }
    if (!is_idle(s)) return std::nullopt;
    bool deposit = v.is_object() && v.value("type", "") == "deposit" && v.contains("to") &&
                   v.contains("amount") && v.contains("transId");
    bool transfer = v.is_object() && v.value("type", "") == "transfer" && v.contains("from") &&
                    v.contains("to") && v.contains("amount") && v.contains("transId");
    if (!deposit && !transfer)
      return JsonValue{{"phase", "bad"}, {"err", "malformed request"}};
    JsonValue first = opt.write_before_tx ? JsonValue("pre_write") : JsonValue("begin");
    return JsonValue{{"phase", first}, {"req", v}};
  };

  m.step = [opt](const ModelState& s) -> std::optional<StepResult> {
    if (!s.contains("phase")) return std::nullopt;
    const std::string phase = s["phase"].get<std::string>();
    ModelState next = s;
    if (phase == "bad")
      return StepResult{JsonValue{{"busy", false}},
                        Command::ret(JsonValue{{"error", s["err"]}})};
    const JsonValue q = s.contains("req") ? s["req"] : JsonValue();
    if (phase == "pre_write") {
      next["phase"] = "begin";
      return StepResult{next, Command::write(tx_id(q), true)};
    }
    if (phase == "begin") {
      next["phase"] = "read_id";
      return StepResult{next, Command::begin_tx()};
    }
    if (phase == "read_id") {
      next["phase"] = "await_id";
      return StepResult{next, Command::read(tx_id(q))};
    }
    if (phase == "replay") {
      next = JsonValue{{"phase", "respond"}, {"result", s["stored"]}};
      return StepResult{next, Command::end_tx()};
    }
    if (phase == "fresh") {
      if (q["type"] == "deposit") {
        next["phase"] = "await_to";
        return StepResult{next, Command::read(account_key(q["to"]))};
      }
      next["phase"] = "await_from";
      return StepResult{next, Command::read(account_key(q["from"]))};
    }
    if (phase == "write_to") {
      next.erase("bal");
      next["phase"] = opt.write_request_key ? "write_id" : "done";
      next["result"] = true;
      return StepResult{next, Command::write(account_key(q["to"]), s["bal"])};
    }
    if (phase == "write_from") {
      next["phase"] = "write_to2";
      return StepResult{next,
                        Command::write(account_key(q["from"]),
                                       num_value(num_or_zero(s["bal_from"]) -
                                                 num_or_zero(q["amount"])))};
    }
    if (phase == "write_to2") {
      next.erase("bal_from");
      next.erase("bal_to");
      next["phase"] = opt.write_request_key ? "write_id" : "done";
      next["result"] = true;
      return StepResult{next, Command::write(account_key(q["to"]), s["bal_to"])};
    }
    if (phase == "write_id") {
      next["phase"] = opt.early_return ? "early" : "done";
      const std::string tid = tx_id(q);
      return StepResult{next, Command::write(opt.foreign_key ? foreign_tx_id(tid) : tid,
                                             s["result"])};
    }
    if (phase == "early")
      return StepResult{JsonValue{{"busy", false}}, Command::ret(s["result"])};
    if (phase == "done") {
      next = JsonValue{{"phase", "respond"}, {"result", s["result"]}};
      return StepResult{next, Command::end_tx()};
    }
    if (phase == "respond")
      return StepResult{JsonValue{{"busy", false}}, Command::ret(s["result"])};
    return std::nullopt;  // await_* phases wait for recv.
  };

  m.request_alphabet = {
      JsonValue{{"type", "deposit"}, {"to", "checking"}, {"amount", 100}, {"transId", "t1"}},
      JsonValue{{"type", "transfer"},
                {"from", "checking"},
                {"to", "savings"},
                {"amount", 40},
                {"transId", "t2"}},
  };
  return m;
}

}  // namespace

BankModels model_bank() {
  return BankModels{bank_naive_model(JsonValue::object()),
                    bank_tx_model("bank-tx", BankTxOptions{})};
}

FunctionModel model_bank_tx_no_write() {
  BankTxOptions opt;
  opt.write_request_key = false;
  return bank_tx_model("bank-tx-no-write", opt);
}

FunctionModel model_bank_tx_foreign_write() {
  BankTxOptions opt;
  opt.foreign_key = true;
  return bank_tx_model("bank-tx-foreign-write", opt);
}

FunctionModel model_bank_tx_early_return() {
  BankTxOptions opt;
  opt.early_return = true;
  return bank_tx_model("bank-tx-early-return", opt);
}

FunctionModel model_bank_tx_write_first() {
  BankTxOptions opt;
  opt.write_before_tx = true;
  return bank_tx_model("bank-tx-write-first", opt);
}

// --- catalog -----------------------------------------------------------------

FunctionModel make_model(const std::string& name, const JsonValue& config) {
  auto cfg = [&](const char* key) -> JsonValue {
    if (config.is_object() && config.contains(key)) return config[key];
    return nullptr;
  };
  if (name == "echo") return model_echo();
  if (name == "auth-cache") {
    std::map<std::string, std::string> db;
    JsonValue d = cfg("database");
    if (d.is_object()) {
      for (auto it = d.begin(); it != d.end(); ++it)
        db[it.key()] = it.value().get<std::string>();
    } else {
      db = {{"u1", "p1"}, {"u2", "p2"}};
    }
    return model_auth_cache(db);
  }
  if (name == "process-id") {
    std::vector<long> pool;
    JsonValue p = cfg("pool");
    if (p.is_array())
      for (const auto& t : p) pool.push_back(t.get<long>());
    else
      pool = {5, 20000};
    return model_process_id(pool);
  }
  if (name == "bank-naive") return bank_naive_model(cfg("accounts"));
  if (name == "bank-tx" || name == "bank") {
    FunctionModel m = model_bank().transactional;
    if (name == "bank") m.name = "bank";
    return m;
  }
  if (name == "counter") return model_counter();
  if (name == "inc") return model_inc();
  if (name == "double") return model_double();
  if (name == "bank-tx-no-write") return model_bank_tx_no_write();
  if (name == "bank-tx-foreign-write") return model_bank_tx_foreign_write();
  if (name == "bank-tx-early-return") return model_bank_tx_early_return();
  if (name == "bank-tx-write-first") return model_bank_tx_write_first();
  throw ModelError("unknown model: " + name);
}

std::vector<std::string> model_names() {
  return {"echo",         "auth-cache",          "process-id",
          "bank-naive",   "bank-tx",             "bank",
          "counter",      "inc",                 "double",
          "bank-tx-no-write", "bank-tx-foreign-write", "bank-tx-early-return",
          "bank-tx-write-first"};
}

namespace {

bool cache_subset(const JsonValue& c, const JsonValue& d) {
  for (auto it = c.begin(); it != c.end(); ++it)
    if (!d.contains(it.key()) || d[it.key()] != it.value()) return false;
  return true;
}

SafetyRelation auth_cache_relation() {
  SafetyRelation r;
  r.name = "auth-cache-default";
  r.related = [](const ModelState& a, const ModelState& b) {
    if (a["d"] != b["d"]) return false;
    if (!cache_subset(a["c"], a["d"]) || !cache_subset(b["c"], b["d"])) return false;
    const bool a_idle = !a["busy"].get<bool>();
    const bool b_idle = !b["busy"].get<bool>();
    if (a_idle != b_idle) return false;
    if (!a_idle && a["q"] != b["q"]) return false;
    return true;
  };
  return r;
}

}  // namespace

SafetyRelation make_relation(const std::string& name, const FunctionModel& model) {
  if (name == "equality")
    return SafetyRelation{"equality",
                          [](const ModelState& a, const ModelState& b) { return a == b; }};
  if (name == "all-related")
    return SafetyRelation{"all-related",
                          [](const ModelState&, const ModelState&) { return true; }};
  if (name == "auth-cache-default") {
    if (model.name != "auth-cache")
      throw ModelError("relation auth-cache-default only applies to auth-cache");
    return auth_cache_relation();
  }
  if (name == "default") {
    if (model.name == "auth-cache") return auth_cache_relation();
    if (model.name == "process-id") return make_relation("all-related", model);
    return make_relation("equality", model);
  }
  throw ModelError("unknown relation: " + name);
}

}  // namespace llab
