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

#ifndef LLAB_MODEL_HPP_
#define LLAB_MODEL_HPP_

#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "llab/json.hpp"

namespace llab {

/// Effect a function instance asks the platform to perform on its next step.
struct Command {
  enum class Kind { Epsilon, Return, BeginTx, EndTx, Read, Write };

  Kind kind = Kind::Epsilon;
  std::string key;   // Read / Write
  JsonValue value;   // Return / Write

  static Command epsilon() { return {}; }
  static Command ret(JsonValue v) { return {Kind::Return, "", std::move(v)}; }
  static Command begin_tx() { return {Kind::BeginTx, "", nullptr}; }
  static Command end_tx() { return {Kind::EndTx, "", nullptr}; }
  static Command read(std::string k) { return {Kind::Read, std::move(k), nullptr}; }
  static Command write(std::string k, JsonValue v) {
    return {Kind::Write, std::move(k), std::move(v)};
  }

  bool operator==(const Command& o) const {
    return kind == o.kind && key == o.key && value == o.value;
  }

  std::string to_text() const;
  JsonValue to_json() const;
};

/// Function state is encoded as a JSON value. That keeps models trivially
/// comparable, hashable and enumerable without per-model plumbing.
using ModelState = JsonValue;

struct StepResult {
  ModelState state;
  Command command;
};

/// A serverless function: deterministic initial state, a receive function and
/// an internal step that may emit a command. recv and step are partial; a
/// nullopt means the function is not defined on that state (the engine treats
/// an instance whose step is undefined as stuck).
struct FunctionModel {
  std::string name;
  ModelState initial;
  /// States an instance may be created with. Models whose behavior depends on
  /// an instance-level detail (the process-id example) expose one entry per
  /// possible instance; everything else has exactly {initial}.
  std::vector<ModelState> initial_variants;
  std::function<std::optional<ModelState>(const JsonValue&, const ModelState&)> recv;
  std::function<std::optional<StepResult>(const ModelState&)> step;
  /// Finite state enumeration; empty when the model is not enumerable.
  std::vector<ModelState> state_enumeration;
  /// Representative request payloads used by the checkers for quantification.
  std::vector<JsonValue> request_alphabet;
  bool uses_store = false;
  /// For store-backed models: the request-id key a payload is stored under.
  std::function<std::optional<std::string>(const JsonValue&)> request_key;

  bool enumerable() const { return !state_enumeration.empty(); }
};

/// Candidate equivalence over function states; verified by the equivalence
/// module, never assumed.
struct SafetyRelation {
  std::string name;
  std::function<bool(const ModelState&, const ModelState&)> related;
};

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- Shipped models -------------------------------------------------------

FunctionModel model_echo();
FunctionModel model_auth_cache(const std::map<std::string, std::string>& database);
FunctionModel model_process_id(const std::vector<long>& pool);

struct BankModels {
  FunctionModel naive;          // Keeps accounts in instance state; loses them.
  FunctionModel transactional;  // Idempotence protocol over the key-value store.
};
BankModels model_bank();

FunctionModel model_counter();

// Transactional-bank mutants used by the idempotence and classification
// checkers.
FunctionModel model_bank_tx_no_write();
FunctionModel model_bank_tx_foreign_write();
FunctionModel model_bank_tx_early_return();
FunctionModel model_bank_tx_write_first();

// Tiny arithmetic functions for the composition pipelines.
FunctionModel model_inc();
FunctionModel model_double();

// --- Catalog ---------------------------------------------------------------

/// Builds a model by registry name; `config` carries seeds (database, pool).
/// Throws ModelError for unknown names.
FunctionModel make_model(const std::string& name, const JsonValue& config = nullptr);
std::vector<std::string> model_names();

/// Builds a named relation for a model ("equality", "all-related",
/// "auth-cache-default", or "default"). Throws ModelError for unknown names.
SafetyRelation make_relation(const std::string& name, const FunctionModel& model);

}  // namespace llab

#endif  // LLAB_MODEL_HPP_
