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

#ifndef LLAB_PLATFORM_HPP_
#define LLAB_PLATFORM_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "llab/json.hpp"
#include "llab/model.hpp"
#include "llab/spl/ast.hpp"

namespace llab {

// --- rules and labels --------------------------------------------------------

enum class Rule {
  Req, Cold, Warm, Hidden, Resp, Die,
  Read, Write, BeginTx, EndTx, DropTx,
  PNewReq, PStart, PRespond, PSeq1, PSeq2, PInvoke1, PInvoke2, PFirst1, PFirst2,
  PDie, PTransform, PCond, PGet, PFault,
};

const char* rule_name(Rule r);
std::optional<Rule> rule_from_name(const std::string& name);

/// Observable event on a transition. Start carries a fresh request id; the
/// internal label is shared by every unobservable rule.
struct Label {
  enum class Kind { Internal, Start, Stop };

  Kind kind = Kind::Internal;
  std::string fn;            // Start: function or program name
  std::uint64_t x = 0;       // Start / Stop
  JsonValue value;           // Start payload / Stop response

  static Label internal() { return {}; }
  static Label start(std::string fn, std::uint64_t x, JsonValue v) {
    return {Kind::Start, std::move(fn), x, std::move(v)};
  }
  static Label stop(std::uint64_t x, JsonValue v) { return {Kind::Stop, "", x, std::move(v)}; }

  bool operator==(const Label& o) const {
    return kind == o.kind && fn == o.fn && x == o.x && value == o.value;
  }

  JsonValue to_json() const;
  std::string to_text() const;
};

// --- components ----------------------------------------------------------------

struct InstanceComp {
  std::string fn;
  std::optional<std::uint64_t> busy_on;  // nullopt = idle
  ModelState state;
  std::uint64_t id;  // y
};

struct RequestComp {
  std::string fn;
  std::uint64_t x;
  JsonValue payload;
};

struct ResponseComp {
  std::uint64_t x;
  JsonValue value;
};

struct ProgramRequestComp {
  std::string name;
  spl::ExprPtr program;
  std::uint64_t x;
  JsonValue payload;
};

struct RunningProgramComp {
  spl::ExprPtr expr;
  JsonValue value;
  spl::KontPtr kont;
};

struct WaitingProgramComp {
  bool pending = false;       // true: waiting on request `waiting_x`
  std::uint64_t waiting_x = 0;
  JsonValue value;            // valid when !pending
  spl::KontPtr kont;
};

using Component = std::variant<RequestComp, InstanceComp, ResponseComp, ProgramRequestComp,
                               RunningProgramComp, WaitingProgramComp>;

JsonValue component_to_json(const Component& c);

using KvMap = std::map<std::string, JsonValue>;

struct StoreState {
  KvMap committed;
  /// Owned lock: owner instance id plus its uncommitted snapshot.
  std::optional<std::pair<std::uint64_t, KvMap>> owner;

  bool free() const { return !owner.has_value(); }
};

/// Global state of the transition system: a canonically-sorted component
/// multiset, an optional store, freshness counters, and the artifact-level
/// bookkeeping that bounds exploration (fired workload events, die budget).
struct Configuration {
  std::vector<Component> components;
  std::optional<StoreState> store;
  std::uint64_t next_request = 1;
  std::uint64_t next_instance = 1;
  std::uint64_t fired_events = 0;
  int die_left = 0;

  void canonicalize();
  JsonValue to_json() const;
  std::string digest() const;
};

// --- engine -------------------------------------------------------------------

struct WorkEvent {
  std::string target;
  bool is_program = false;
  JsonValue payload;
  std::size_t earliest_step = 0;
};

struct Workload {
  std::vector<WorkEvent> events;
  KvMap store_seed;
  bool has_store_seed = false;
};

/// Parses a workload document: {"events": [{"function"|"program": name,
/// "payload": v, "earliest-step": n}, ...], "store-seed": {...}}.
Workload parse_workload(const JsonValue& doc);

struct Catalog {
  std::map<std::string, FunctionModel> models;
  std::map<std::string, spl::ExprPtr> programs;
  /// Resolver behind the fetch primitive; maps URL strings to fixture values.
  std::function<std::optional<JsonValue>(const std::string&)> get_resolver;

  void add(FunctionModel m) { models[m.name] = std::move(m); }
};

struct FaultBudget {
  int die_budget = 0;
  int max_instances_per_request = 2;
  int max_programs_per_request = 2;
  std::size_t max_steps = 1000;
};

struct Transition {
  Rule rule = Rule::Req;
  Label label;
  Configuration next;
  std::string source_digest;
  int fired_event = -1;  // Req / P-NewReq: workload event index
  JsonValue detail;      // rule-specific extras (keys, committed snapshots)
};

struct EngineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TraceRecord {
  std::size_t step = 0;
  std::string semantics = "lambda";
  std::string rule;
  Label label;
  std::string digest;
  JsonValue detail;  // rule-specific extras (keys, committed values)

  JsonValue to_json() const;
};

struct Trace {
  std::vector<TraceRecord> records;
  Configuration final_config;
  bool quiescent = false;
  /// Request id assigned to each fired workload event.
  std::map<int, std::uint64_t> event_requests;
};

struct RandomScheduler { std::uint64_t seed = 0; };
struct ExhaustiveScheduler { std::size_t depth = 0; };

struct ScriptChoice {
  std::optional<std::size_t> index;   // index into the enabled list
  std::optional<std::string> rule;    // rule name; `pick` disambiguates
  std::size_t pick = 0;
};
struct ScriptScheduler { std::vector<ScriptChoice> choices; };

using Scheduler = std::variant<RandomScheduler, ExhaustiveScheduler, ScriptScheduler>;

/// Parses ["Req", {"rule": "Resp", "pick": 0}, 3, ...].
ScriptScheduler parse_script(const JsonValue& doc);

class Engine {
 public:
  Engine(const Catalog& catalog, Workload workload, FaultBudget budget);

  Configuration initial() const;

  /// Every enabled rule instantiation, deterministically ordered. Transitions
  /// that agree on rule, label and successor are collapsed (interchangeable
  /// multiset elements produce identical successors).
  std::vector<Transition> enabled(const Configuration& config, std::size_t step) const;

  /// Commits a transition. Throws EngineError if it was not derived from
  /// `config` (stale transition).
  Configuration apply(const Configuration& config, const Transition& t) const;

  Trace run(const Scheduler& scheduler) const;

  struct ExploreEdge {
    Rule rule;
    Label label;
    std::string to;
    int fired_event = -1;
  };
  struct ExploreResult {
    std::string root;
    std::map<std::string, Configuration> nodes;
    std::map<std::string, std::vector<ExploreEdge>> edges;
    bool truncated = false;
    std::size_t transitions = 0;
  };
  /// Breadth-first graph exploration with visited-digest pruning; `threads`
  /// > 1 fans the frontier out across workers.
  ExploreResult explore(std::size_t depth, std::size_t node_limit = 200000,
                        unsigned threads = 1) const;

  struct TraceSet {
    std::vector<Trace> traces;
    bool truncated = false;
  };
  /// All maximal traces up to `depth` (depth-first; capped at `max_traces`).
  TraceSet enumerate_traces(std::size_t depth, std::size_t max_traces = 100000) const;

  const Workload& workload() const { return workload_; }
  const Catalog& catalog() const { return *catalog_; }
  const FaultBudget& budget() const { return budget_; }

 private:
  const Catalog* catalog_;
  Workload workload_;
  FaultBudget budget_;
};

/// Sub-sequence of the observable labels carrying request id x.
std::vector<Label> observable_project(const std::vector<TraceRecord>& records, std::uint64_t x);
std::vector<Label> observable_project(const std::vector<Label>& labels, std::uint64_t x);

}  // namespace llab

#endif  // LLAB_PLATFORM_HPP_
