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

#include "llab/platform.hpp"

#include <algorithm>
#include <deque>
#include <mutex>
#include <random>
#include <set>
#include <thread>

#include "llab/spl/eval.hpp"
#include "llab/spl/text.hpp"

namespace llab {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Req: return "Req";
    case Rule::Cold: return "Cold";
    case Rule::Warm: return "Warm";
    case Rule::Hidden: return "Hidden";
    case Rule::Resp: return "Resp";
    case Rule::Die: return "Die";
    case Rule::Read: return "Read";
    case Rule::Write: return "Write";
    case Rule::BeginTx: return "BeginTx";
    case Rule::EndTx: return "EndTx";
    case Rule::DropTx: return "DropTx";
    case Rule::PNewReq: return "P-NewReq";
    case Rule::PStart: return "P-Start";
    case Rule::PRespond: return "P-Respond";
    case Rule::PSeq1: return "P-Seq1";
    case Rule::PSeq2: return "P-Seq2";
    case Rule::PInvoke1: return "P-Invoke1";
    case Rule::PInvoke2: return "P-Invoke2";
    case Rule::PFirst1: return "P-First1";
    case Rule::PFirst2: return "P-First2";
    case Rule::PDie: return "P-Die";
    case Rule::PTransform: return "P-Transform";
    case Rule::PCond: return "P-Cond";
    case Rule::PGet: return "P-Get";
    case Rule::PFault: return "P-Fault";
  }
  return "?";
}

std::optional<Rule> rule_from_name(const std::string& name) {
  static const Rule all[] = {
      Rule::Req, Rule::Cold, Rule::Warm, Rule::Hidden, Rule::Resp, Rule::Die,
      Rule::Read, Rule::Write, Rule::BeginTx, Rule::EndTx, Rule::DropTx,
      Rule::PNewReq, Rule::PStart, Rule::PRespond, Rule::PSeq1, Rule::PSeq2,
      Rule::PInvoke1, Rule::PInvoke2, Rule::PFirst1, Rule::PFirst2, Rule::PDie,
      Rule::PTransform, Rule::PCond, Rule::PGet, Rule::PFault};
  for (Rule r : all)
    if (name == rule_name(r)) return r;
  return std::nullopt;
}

JsonValue Label::to_json() const {
  switch (kind) {
    case Kind::Internal:
      return {{"type", "internal"}};
    case Kind::Start:
      return {{"type", "start"}, {"f", fn}, {"x", "x" + std::to_string(x)}, {"v", value}};
    case Kind::Stop:
      return {{"type", "stop"}, {"x", "x" + std::to_string(x)}, {"v", value}};
  }
  return nullptr;
}

std::string Label::to_text() const {
  switch (kind) {
    case Kind::Internal:
      return "internal";
    case Kind::Start:
      return "start(" + fn + ",x" + std::to_string(x) + "," + value.dump() + ")";
    case Kind::Stop:
      return "stop(x" + std::to_string(x) + "," + value.dump() + ")";
  }
  return "?";
}

JsonValue component_to_json(const Component& c) {
  if (const auto* r = std::get_if<RequestComp>(&c))
    return {{"kind", "request"}, {"f", r->fn}, {"x", r->x}, {"v", r->payload}};
  if (const auto* i = std::get_if<InstanceComp>(&c)) {
    JsonValue busy = i->busy_on ? JsonValue(*i->busy_on) : JsonValue(nullptr);
    return {{"kind", "instance"}, {"f", i->fn}, {"busy", busy}, {"state", i->state},
            {"y", i->id}};
  }
  if (const auto* r = std::get_if<ResponseComp>(&c))
    return {{"kind", "response"}, {"x", r->x}, {"v", r->value}};
  if (const auto* p = std::get_if<ProgramRequestComp>(&c))
    return {{"kind", "program-request"}, {"name", p->name},
            {"expr", spl::to_text(p->program)}, {"x", p->x}, {"v", p->payload}};
  if (const auto* p = std::get_if<RunningProgramComp>(&c))
    return {{"kind", "running"}, {"expr", spl::to_text(p->expr)}, {"v", p->value},
            {"k", spl::to_text(p->kont)}};
  if (const auto* p = std::get_if<WaitingProgramComp>(&c)) {
    JsonValue token = p->pending ? JsonValue("x" + std::to_string(p->waiting_x)) : p->value;
    return {{"kind", "waiting"}, {"pending", p->pending}, {"token", token},
            {"k", spl::to_text(p->kont)}};
  }
  return nullptr;
}

namespace {

int component_rank(const Component& c) { return static_cast<int>(c.index()); }

}  // namespace

void Configuration::canonicalize() {
  std::stable_sort(components.begin(), components.end(),
                   [](const Component& a, const Component& b) {
                     int ra = component_rank(a), rb = component_rank(b);
                     if (ra != rb) return ra < rb;
                     return component_to_json(a).dump() < component_to_json(b).dump();
                   });
}

JsonValue Configuration::to_json() const {
  JsonValue comps = JsonValue::array();
  for (const auto& c : components) comps.push_back(component_to_json(c));
  JsonValue store_json = nullptr;
  if (store) {
    store_json = JsonValue::object();
    store_json["committed"] = store->committed;
    if (store->owner) {
      store_json["owner"] = store->owner->first;
      store_json["snapshot"] = store->owner->second;
    } else {
      store_json["owner"] = nullptr;
    }
  }
  return {{"components", comps}, {"store", store_json},   {"next_x", next_request},
          {"next_y", next_instance}, {"fired", fired_events}, {"die_left", die_left}};
}

std::string Configuration::digest() const { return digest_of(to_json().dump()); }

Workload parse_workload(const JsonValue& doc) {
  Workload w;
  if (!doc.is_object()) throw EngineError("workload document must be a JSON object");
  if (doc.contains("events")) {
    for (const auto& e : doc["events"]) {
      WorkEvent ev;
      if (e.contains("function")) {
        ev.target = e["function"].get<std::string>();
      } else if (e.contains("program")) {
        ev.target = e["program"].get<std::string>();
        ev.is_program = true;
      } else {
        throw EngineError("workload event needs a 'function' or 'program' target");
      }
      ev.payload = e.value("payload", JsonValue(nullptr));
      ev.earliest_step = e.value("earliest-step", 0u);
      w.events.push_back(std::move(ev));
    }
  }
  if (w.events.size() > 64) throw EngineError("workloads are limited to 64 events");
  if (doc.contains("store-seed")) {
    w.has_store_seed = true;
    for (auto it = doc["store-seed"].begin(); it != doc["store-seed"].end(); ++it)
      w.store_seed[it.key()] = it.value();
  }
  return w;
}

ScriptScheduler parse_script(const JsonValue& doc) {
  if (!doc.is_array()) throw EngineError("script must be a JSON array of choices");
  ScriptScheduler s;
  for (const auto& c : doc) {
    ScriptChoice choice;
    if (c.is_number_integer()) {
      choice.index = c.get<std::size_t>();
    } else if (c.is_string()) {
      choice.rule = c.get<std::string>();
    } else if (c.is_object() && c.contains("rule")) {
      choice.rule = c["rule"].get<std::string>();
      choice.pick = c.value("pick", 0u);
    } else {
      throw EngineError("script entries are indices, rule names, or {rule, pick}");
    }
    if (choice.rule && !rule_from_name(*choice.rule))
      throw EngineError("script names unknown rule '" + *choice.rule + "'");
    s.choices.push_back(std::move(choice));
  }
  return s;
}

// --- engine ---------------------------------------------------------------------

Engine::Engine(const Catalog& catalog, Workload workload, FaultBudget budget)
    : catalog_(&catalog), workload_(std::move(workload)), budget_(budget) {}

Configuration Engine::initial() const {
  Configuration c;
  c.die_left = budget_.die_budget;
  bool store_needed = workload_.has_store_seed;
  for (const auto& [name, model] : catalog_->models)
    if (model.uses_store) store_needed = true;
  if (store_needed) {
    StoreState s;
    s.committed = workload_.store_seed;
    c.store = std::move(s);
  }
  return c;
}

namespace {

std::uint64_t kont_root(const spl::KontPtr& k) {
  const spl::Kont* cur = k.get();
  while (cur && cur->kind != spl::Kont::Kind::Return) cur = cur->next.get();
  return cur ? cur->x : 0;
}

struct PendingNext {
  Rule rule;
  Label label;
  Configuration next;
  int fired_event = -1;
  JsonValue detail;
};

}  // namespace

std::vector<Transition> Engine::enabled(const Configuration& config, std::size_t step) const {
  std::vector<PendingNext> out;
  const auto& comps = config.components;

  auto busy_count = [&](std::uint64_t x) {
    int n = 0;
    for (const auto& c : comps)
      if (const auto* inst = std::get_if<InstanceComp>(&c))
        if (inst->busy_on && *inst->busy_on == x) ++n;
    return n;
  };
  auto program_count = [&](std::uint64_t x) {
    int n = 0;
    for (const auto& c : comps) {
      if (const auto* r = std::get_if<RunningProgramComp>(&c))
        n += kont_root(r->kont) == x;
      if (const auto* w = std::get_if<WaitingProgramComp>(&c))
        n += kont_root(w->kont) == x;
    }
    return n;
  };
  auto base_next = [&]() {
    Configuration n = config;
    return n;
  };
  auto without = [&](const Configuration& c, std::size_t idx) {
    Configuration n = c;
    n.components.erase(n.components.begin() + static_cast<std::ptrdiff_t>(idx));
    return n;
  };

  // Req / P-NewReq: any unfired event whose earliest step has been reached.
  for (std::size_t e = 0; e < workload_.events.size(); ++e) {
    if (config.fired_events & (1ull << e)) continue;
    const WorkEvent& ev = workload_.events[e];
    if (step < ev.earliest_step) continue;
    Configuration n = base_next();
    n.fired_events |= (1ull << e);
    std::uint64_t x = n.next_request++;
    if (!ev.is_program) {
      if (!catalog_->models.count(ev.target))
        throw EngineError("workload targets unknown model '" + ev.target + "'");
      n.components.push_back(RequestComp{ev.target, x, ev.payload});
      out.push_back({Rule::Req, Label::start(ev.target, x, ev.payload), std::move(n),
                     static_cast<int>(e), nullptr});
    } else {
      auto it = catalog_->programs.find(ev.target);
      if (it == catalog_->programs.end())
        throw EngineError("workload targets unknown program '" + ev.target + "'");
      n.components.push_back(ProgramRequestComp{ev.target, it->second, x, ev.payload});
      out.push_back({Rule::PNewReq, Label::start(ev.target, x, ev.payload), std::move(n),
                     static_cast<int>(e), nullptr});
    }
  }

  // Rules keyed on a request component.
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto* req = std::get_if<RequestComp>(&comps[i]);
    if (!req) continue;
    const FunctionModel& model = catalog_->models.at(req->fn);
    if (busy_count(req->x) < budget_.max_instances_per_request) {
      // Cold: one instantiation per creatable initial state.
      for (const auto& variant : model.initial_variants) {
        auto sigma = model.recv(req->payload, variant);
        if (!sigma) continue;
        Configuration n = base_next();
        std::uint64_t y = n.next_instance++;
        n.components.push_back(InstanceComp{req->fn, req->x, *sigma, y});
        out.push_back({Rule::Cold, Label::internal(), std::move(n), -1, nullptr});
      }
      // Warm: reuse any idle instance of the same function.
      for (std::size_t j = 0; j < comps.size(); ++j) {
        const auto* inst = std::get_if<InstanceComp>(&comps[j]);
        if (!inst || inst->busy_on || inst->fn != req->fn) continue;
        auto sigma = model.recv(req->payload, inst->state);
        if (!sigma) continue;
        Configuration n = base_next();
        auto& slot = std::get<InstanceComp>(n.components[j]);
        slot.busy_on = req->x;
        slot.state = *sigma;
        out.push_back({Rule::Warm, Label::internal(), std::move(n), -1, nullptr});
      }
    }
  }

  // Rules keyed on a busy instance: Hidden, Resp, and the store commands.
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto* inst = std::get_if<InstanceComp>(&comps[i]);
    if (!inst || !inst->busy_on) continue;
    const FunctionModel& model = catalog_->models.at(inst->fn);
    auto result = model.step(inst->state);
    if (!result) continue;  // Waiting on recv or undefined: stuck here.
    const Command& cmd = result->command;
    const std::uint64_t x = *inst->busy_on;

    switch (cmd.kind) {
      case Command::Kind::Epsilon: {
        Configuration n = base_next();
        std::get<InstanceComp>(n.components[i]).state = result->state;
        out.push_back({Rule::Hidden, Label::internal(), std::move(n), -1, nullptr});
        break;
      }
      case Command::Kind::Return: {
        // Resp consumes the request; without it the instance is stuck.
        for (std::size_t j = 0; j < comps.size(); ++j) {
          const auto* req = std::get_if<RequestComp>(&comps[j]);
          if (!req || req->x != x) continue;
          Configuration n = base_next();
          auto& slot = std::get<InstanceComp>(n.components[i]);
          slot.busy_on = std::nullopt;
          slot.state = result->state;
          n.components.push_back(ResponseComp{x, cmd.value});
          n.components.erase(n.components.begin() + static_cast<std::ptrdiff_t>(j));
          out.push_back({Rule::Resp, Label::stop(x, cmd.value), std::move(n), -1, nullptr});
          break;
        }
        break;
      }
      case Command::Kind::BeginTx: {
        if (!config.store || !config.store->free()) break;  // blocks until free
        Configuration n = base_next();
        std::get<InstanceComp>(n.components[i]).state = result->state;
        n.store->owner = {inst->id, n.store->committed};
        out.push_back({Rule::BeginTx, Label::internal(), std::move(n), -1,
                       JsonValue{{"y", inst->id}}});
        break;
      }
      case Command::Kind::Read: {
        if (!config.store || config.store->free() ||
            config.store->owner->first != inst->id)
          break;
        const KvMap& snap = config.store->owner->second;
        auto it = snap.find(cmd.key);
        JsonValue value = it == snap.end() ? JsonValue(nullptr) : it->second;
        auto sigma = model.recv(value, result->state);
        if (!sigma) break;
        Configuration n = base_next();
        std::get<InstanceComp>(n.components[i]).state = *sigma;
        out.push_back({Rule::Read, Label::internal(), std::move(n), -1,
                       JsonValue{{"key", cmd.key}, {"value", value}}});
        break;
      }
      case Command::Kind::Write: {
        if (!config.store || config.store->free() ||
            config.store->owner->first != inst->id)
          break;
        Configuration n = base_next();
        std::get<InstanceComp>(n.components[i]).state = result->state;
        n.store->owner->second[cmd.key] = cmd.value;
        out.push_back({Rule::Write, Label::internal(), std::move(n), -1,
                       JsonValue{{"key", cmd.key}, {"value", cmd.value}}});
        break;
      }
      case Command::Kind::EndTx: {
        if (!config.store || config.store->free() ||
            config.store->owner->first != inst->id)
          break;
        Configuration n = base_next();
        std::get<InstanceComp>(n.components[i]).state = result->state;
        n.store->committed = n.store->owner->second;
        n.store->owner.reset();
        out.push_back({Rule::EndTx, Label::internal(), std::move(n), -1,
                       JsonValue{{"committed", JsonValue(config.store->owner->second)}}});
        break;
      }
    }
  }

  // Die: any instance may vanish while the fault budget lasts.
  if (config.die_left > 0) {
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (!std::holds_alternative<InstanceComp>(comps[i])) continue;
      Configuration n = without(config, i);
      n.die_left -= 1;
      out.push_back({Rule::Die, Label::internal(), std::move(n), -1, nullptr});
    }
  }

  // DropTx: the lock owner no longer exists.
  if (config.store && !config.store->free()) {
    std::uint64_t owner = config.store->owner->first;
    bool alive = false;
    for (const auto& c : comps)
      if (const auto* inst = std::get_if<InstanceComp>(&c))
        if (inst->id == owner) alive = true;
    if (!alive) {
      Configuration n = base_next();
      n.store->owner.reset();
      out.push_back({Rule::DropTx, Label::internal(), std::move(n), -1, nullptr});
    }
  }

  // P-Start: a program request may spawn another program (at-least-once).
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto* pr = std::get_if<ProgramRequestComp>(&comps[i]);
    if (!pr) continue;
    if (program_count(pr->x) >= budget_.max_programs_per_request) continue;
    Configuration n = base_next();
    n.components.push_back(
        RunningProgramComp{pr->program, pr->payload, spl::kont_return(pr->x)});
    out.push_back({Rule::PStart, Label::internal(), std::move(n), -1, nullptr});
  }

  // Machine steps for running programs.
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto* run = std::get_if<RunningProgramComp>(&comps[i]);
    if (!run) continue;
    auto fault = [&](const std::string& msg) {
      // A faulting program answers its request with an error object, or just
      // disappears when a twin already responded.
      JsonValue err{{"error", msg}};
      std::uint64_t x = kont_root(run->kont);
      Configuration n = without(config, i);
      for (std::size_t j = 0; j < n.components.size(); ++j) {
        const auto* pr = std::get_if<ProgramRequestComp>(&n.components[j]);
        if (pr && pr->x == x) {
          n.components.erase(n.components.begin() + static_cast<std::ptrdiff_t>(j));
          n.components.push_back(ResponseComp{x, err});
          out.push_back({Rule::PFault, Label::stop(x, err), std::move(n), -1, nullptr});
          return;
        }
      }
      out.push_back({Rule::PFault, Label::internal(), std::move(n), -1, nullptr});
    };

    switch (run->expr->kind) {
      case spl::SplExpr::Kind::Seq: {
        Configuration n = base_next();
        auto& slot = std::get<RunningProgramComp>(n.components[i]);
        slot.kont = spl::kont_seq(run->expr->b, run->kont);
        slot.expr = run->expr->a;
        out.push_back({Rule::PSeq1, Label::internal(), std::move(n), -1, nullptr});
        break;
      }
      case spl::SplExpr::Kind::Invoke: {
        if (!catalog_->models.count(run->expr->fn)) {
          fault("unknown function '" + run->expr->fn + "'");
          break;
        }
        Configuration n = without(config, i);
        std::uint64_t x2 = n.next_request++;
        n.components.push_back(RequestComp{run->expr->fn, x2, run->value});
        n.components.push_back(WaitingProgramComp{true, x2, nullptr, run->kont});
        out.push_back({Rule::PInvoke1, Label::internal(), std::move(n), -1, nullptr});
        break;
      }
      case spl::SplExpr::Kind::First: {
        if (!run->value.is_array() || run->value.size() != 2) {
          fault("first applied to a value that is not a 2-element array");
          break;
        }
        Configuration n = base_next();
        auto& slot = std::get<RunningProgramComp>(n.components[i]);
        slot.kont = spl::kont_first(run->value[1], run->kont);
        slot.expr = run->expr->a;
        slot.value = run->value[0];
        out.push_back({Rule::PFirst1, Label::internal(), std::move(n), -1, nullptr});
        break;
      }
      case spl::SplExpr::Kind::Transform: {
        try {
          JsonValue v = spl::json_eval(run->expr->pattern, run->value);
          Configuration n = without(config, i);
          n.components.push_back(WaitingProgramComp{false, 0, v, run->kont});
          out.push_back({Rule::PTransform, Label::internal(), std::move(n), -1, nullptr});
        } catch (const spl::TransformError& e) {
          fault(e.what());
        }
        break;
      }
      case spl::SplExpr::Kind::Cond: {
        try {
          JsonValue c = spl::json_eval(run->expr->pattern, run->value);
          if (!c.is_boolean()) {
            fault("conditional did not evaluate to a boolean");
            break;
          }
          Configuration n = base_next();
          auto& slot = std::get<RunningProgramComp>(n.components[i]);
          slot.expr = c.get<bool>() ? run->expr->a : run->expr->b;
          out.push_back({Rule::PCond, Label::internal(), std::move(n), -1, nullptr});
        } catch (const spl::TransformError& e) {
          fault(e.what());
        }
        break;
      }
      case spl::SplExpr::Kind::Get: {
        if (!run->value.is_string()) {
          fault("get applied to a non-string value");
          break;
        }
        std::optional<JsonValue> fetched;
        if (catalog_->get_resolver) fetched = catalog_->get_resolver(run->value.get<std::string>());
        if (!fetched) {
          fault("get could not resolve '" + run->value.get<std::string>() + "'");
          break;
        }
        Configuration n = without(config, i);
        n.components.push_back(WaitingProgramComp{false, 0, *fetched, run->kont});
        out.push_back({Rule::PGet, Label::internal(), std::move(n), -1, nullptr});
        break;
      }
    }
  }

  // Waiting programs: resume on a response, pop continuations, respond.
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto* wait = std::get_if<WaitingProgramComp>(&comps[i]);
    if (!wait) continue;
    if (wait->pending) {
      for (std::size_t j = 0; j < comps.size(); ++j) {
        const auto* resp = std::get_if<ResponseComp>(&comps[j]);
        if (!resp || resp->x != wait->waiting_x) continue;
        Configuration n = base_next();
        auto& slot = std::get<WaitingProgramComp>(n.components[i]);
        slot.pending = false;
        slot.waiting_x = 0;
        slot.value = resp->value;
        n.components.erase(n.components.begin() + static_cast<std::ptrdiff_t>(j));
        out.push_back({Rule::PInvoke2, Label::internal(), std::move(n), -1, nullptr});
        break;
      }
      continue;
    }
    switch (wait->kont->kind) {
      case spl::Kont::Kind::SeqK: {
        Configuration n = without(config, i);
        n.components.push_back(
            RunningProgramComp{wait->kont->expr, wait->value, wait->kont->next});
        out.push_back({Rule::PSeq2, Label::internal(), std::move(n), -1, nullptr});
        break;
      }
      case spl::Kont::Kind::FirstK: {
        Configuration n = base_next();
        auto& slot = std::get<WaitingProgramComp>(n.components[i]);
        slot.value = JsonValue{wait->value, wait->kont->value};
        slot.kont = wait->kont->next;
        out.push_back({Rule::PFirst2, Label::internal(), std::move(n), -1, nullptr});
        break;
      }
      case spl::Kont::Kind::Return: {
        std::uint64_t x = wait->kont->x;
        for (std::size_t j = 0; j < comps.size(); ++j) {
          const auto* pr = std::get_if<ProgramRequestComp>(&comps[j]);
          if (!pr || pr->x != x) continue;
          Configuration n = base_next();
          n.components.push_back(ResponseComp{x, wait->value});
          // Erase the higher index first.
          std::size_t a = std::max(i, j), b = std::min(i, j);
          n.components.erase(n.components.begin() + static_cast<std::ptrdiff_t>(a));
          n.components.erase(n.components.begin() + static_cast<std::ptrdiff_t>(b));
          out.push_back(
              {Rule::PRespond, Label::stop(x, wait->value), std::move(n), -1, nullptr});
          break;
        }
        break;
      }
    }
  }

  // P-Die: waiting programs share the fault budget with instances.
  if (config.die_left > 0) {
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (!std::holds_alternative<WaitingProgramComp>(comps[i])) continue;
      Configuration n = without(config, i);
      n.die_left -= 1;
      out.push_back({Rule::PDie, Label::internal(), std::move(n), -1, nullptr});
    }
  }

  // Canonicalize successors, then collapse interchangeable instantiations.
  std::string source = config.digest();
  std::vector<Transition> result;
  std::set<std::string> seen;
  for (auto& p : out) {
    p.next.canonicalize();
    Transition t;
    t.rule = p.rule;
    t.label = p.label;
    t.next = std::move(p.next);
    t.source_digest = source;
    t.fired_event = p.fired_event;
    t.detail = std::move(p.detail);
    std::string key = std::string(rule_name(t.rule)) + "|" + t.label.to_json().dump() + "|" +
                      t.next.digest();
    if (!seen.insert(key).second) continue;
    result.push_back(std::move(t));
  }
  return result;
}

Configuration Engine::apply(const Configuration& config, const Transition& t) const {
  if (t.source_digest != config.digest())
    throw EngineError("stale transition: it was derived from a different configuration");
  return t.next;
}

Trace Engine::run(const Scheduler& scheduler) const {
  if (std::holds_alternative<ExhaustiveScheduler>(scheduler))
    throw EngineError("the exhaustive scheduler enumerates traces; use enumerate_traces");

  Trace trace;
  Configuration cfg = initial();
  cfg.canonicalize();
  std::mt19937_64 rng(std::holds_alternative<RandomScheduler>(scheduler)
                          ? std::get<RandomScheduler>(scheduler).seed
                          : 0);
  const ScriptScheduler* script = std::get_if<ScriptScheduler>(&scheduler);

  for (std::size_t step = 0;; ++step) {
    std::vector<Transition> ts = enabled(cfg, step);
    if (ts.empty()) {
      trace.quiescent = true;
      break;
    }
    if (script && step >= script->choices.size()) {
      trace.quiescent = false;
      break;
    }
    if (!script && step >= budget_.max_steps) {
      trace.quiescent = false;
      break;
    }

    std::size_t pick = 0;
    if (script) {
      const ScriptChoice& choice = script->choices[step];
      if (choice.index) {
        if (*choice.index >= ts.size())
          throw EngineError("script step " + std::to_string(step) + ": choice index " +
                            std::to_string(*choice.index) + " out of range (" +
                            std::to_string(ts.size()) + " enabled)");
        pick = *choice.index;
      } else {
        std::vector<std::size_t> matching;
        for (std::size_t i = 0; i < ts.size(); ++i)
          if (rule_name(ts[i].rule) == *choice.rule) matching.push_back(i);
        if (choice.pick >= matching.size())
          throw EngineError("script step " + std::to_string(step) + ": rule '" + *choice.rule +
                            "' has " + std::to_string(matching.size()) +
                            " enabled instantiation(s), pick " + std::to_string(choice.pick) +
                            " is out of range");
        pick = matching[choice.pick];
      }
    } else {
      pick = static_cast<std::size_t>(rng() % ts.size());
    }

    Transition& t = ts[pick];
    if (t.fired_event >= 0) trace.event_requests[t.fired_event] = t.label.x;
    TraceRecord rec;
    rec.step = step;
    rec.rule = rule_name(t.rule);
    rec.label = t.label;
    rec.digest = t.next.digest();
    rec.detail = transition_detail(*this, t);
    trace.records.push_back(std::move(rec));
    cfg = std::move(t.next);
  }
  trace.final_config = std::move(cfg);
  return trace;
}

Engine::ExploreResult Engine::explore(std::size_t depth, std::size_t node_limit,
                                      unsigned threads) const {
  ExploreResult result;
  Configuration root = initial();
  root.canonicalize();
  result.root = root.digest();
  result.nodes.emplace(result.root, root);

  std::vector<std::pair<std::string, Configuration>> frontier{{result.root, root}};
  std::mutex mu;

  for (std::size_t d = 0; d < depth && !frontier.empty(); ++d) {
    std::vector<std::pair<std::string, Configuration>> next_frontier;

    auto expand = [&](std::size_t begin, std::size_t end) {
      std::vector<std::pair<std::string, std::vector<Transition>>> local;
      for (std::size_t i = begin; i < end; ++i)
        local.emplace_back(frontier[i].first, enabled(frontier[i].second, d));
      std::lock_guard<std::mutex> lock(mu);
      for (auto& [from, ts] : local) {
        auto& edge_list = result.edges[from];
        for (auto& t : ts) {
          std::string to = t.next.digest();
          edge_list.push_back({t.rule, t.label, to, t.fired_event});
          ++result.transitions;
          if (!result.nodes.count(to)) {
            if (result.nodes.size() >= node_limit) {
              result.truncated = true;
              continue;
            }
            result.nodes.emplace(to, t.next);
            next_frontier.emplace_back(to, std::move(t.next));
          }
        }
      }
    };

    if (threads <= 1 || frontier.size() < 2) {
      expand(0, frontier.size());
    } else {
      unsigned n = std::min<unsigned>(threads, static_cast<unsigned>(frontier.size()));
      std::vector<std::thread> pool;
      std::size_t chunk = (frontier.size() + n - 1) / n;
      for (unsigned t = 0; t < n; ++t) {
        std::size_t begin = t * chunk;
        std::size_t end = std::min(frontier.size(), begin + chunk);
        if (begin >= end) break;
        pool.emplace_back(expand, begin, end);
      }
      for (auto& th : pool) th.join();
      // Deterministic ordering regardless of thread scheduling.
      std::sort(next_frontier.begin(), next_frontier.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
    }
    frontier = std::move(next_frontier);
    if (result.truncated) break;
  }
  return result;
}

Engine::TraceSet Engine::enumerate_traces(std::size_t depth, std::size_t max_traces) const {
  TraceSet result;
  Configuration root = initial();
  root.canonicalize();

  std::vector<TraceRecord> path;
  std::map<int, std::uint64_t> events;

  std::function<void(const Configuration&, std::size_t)> walk = [&](const Configuration& cfg,
                                                                    std::size_t step) {
    if (result.truncated) return;
    std::vector<Transition> ts = step < depth ? enabled(cfg, step) : std::vector<Transition>{};
    if (ts.empty()) {
      if (result.traces.size() >= max_traces) {
        result.truncated = true;
        return;
      }
      Trace t;
      t.records = path;
      t.final_config = cfg;
      t.quiescent = enabled(cfg, step).empty();
      t.event_requests = events;
      result.traces.push_back(std::move(t));
      return;
    }
    for (auto& t : ts) {
      TraceRecord rec;
      rec.step = step;
      rec.rule = rule_name(t.rule);
      rec.label = t.label;
      rec.digest = t.next.digest();
      path.push_back(rec);
      bool fired = t.fired_event >= 0;
      if (fired) events[t.fired_event] = t.label.x;
      walk(t.next, step + 1);
      if (fired) events.erase(t.fired_event);
      path.pop_back();
      if (result.truncated) return;
    }
  };
  walk(root, 0);
  return result;
}

JsonValue TraceRecord::to_json() const {
  JsonValue j{{"step", step}, {"semantics", semantics}, {"rule", rule},
              {"label", label.to_json()}, {"digest", digest}};
  if (!detail.is_null()) j["detail"] = detail;
  return j;
}

std::vector<Label> observable_project(const std::vector<TraceRecord>& records,
                                      std::uint64_t x) {
  std::vector<Label> out;
  for (const auto& r : records)
    if (r.label.kind != Label::Kind::Internal && r.label.x == x) out.push_back(r.label);
  return out;
}

std::vector<Label> observable_project(const std::vector<Label>& labels, std::uint64_t x) {
  std::vector<Label> out;
  for (const auto& l : labels)
    if (l.kind != Label::Kind::Internal && l.x == x) out.push_back(l);
  return out;
}

}  // namespace llab
