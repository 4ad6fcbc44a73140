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

#ifndef LLAB_SPL_AST_HPP_
#define LLAB_SPL_AST_HPP_

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "llab/json.hpp"

namespace llab::spl {

/// Query into a JSON value: a sequence of array-index and field-lookup steps.
/// The empty query selects the value itself.
struct JsonQuery {
  struct Step {
    bool is_index = false;
    long index = 0;
    std::string field;

    bool operator==(const Step& o) const {
      return is_index == o.is_index && index == o.index && field == o.field;
    }
  };

  std::vector<Step> steps;

  static JsonQuery::Step at(long i) { return Step{true, i, ""}; }
  static JsonQuery::Step key(std::string f) { return Step{false, 0, std::move(f)}; }

  bool empty() const { return steps.empty(); }
  bool operator==(const JsonQuery& o) const { return steps == o.steps; }
  /// True when `this` is a (possibly equal) prefix of q.
  bool prefix_of(const JsonQuery& q) const;
  JsonQuery suffix_after(std::size_t n) const;
  std::string to_text() const;
};

struct JsonPattern;
using PatternPtr = std::shared_ptr<const JsonPattern>;

/// The transformation sub-language applied between invocations. `Var` only
/// appears in surface programs; the compiler resolves every variable to an
/// `Input` query before a pattern reaches the evaluator.
struct JsonPattern {
  enum class Kind { Literal, Array, Object, BinOp, If, UpdateField, Input, Var };

  Kind kind = Kind::Literal;
  JsonValue literal;
  std::vector<PatternPtr> items;                            // Array
  std::vector<std::pair<std::string, PatternPtr>> fields;   // Object
  std::string op;                                           // BinOp
  PatternPtr lhs, rhs;                                      // BinOp
  PatternPtr cond, then_p, else_p;                          // If
  PatternPtr base;                                          // UpdateField
  std::string field;                                        // UpdateField
  PatternPtr value_p;                                       // UpdateField
  JsonQuery query;                                          // Input / Var
  std::string var;                                          // Var
};

PatternPtr pat_literal(JsonValue v);
PatternPtr pat_array(std::vector<PatternPtr> items);
PatternPtr pat_object(std::vector<std::pair<std::string, PatternPtr>> fields);
PatternPtr pat_binop(std::string op, PatternPtr lhs, PatternPtr rhs);
PatternPtr pat_if(PatternPtr cond, PatternPtr then_p, PatternPtr else_p);
PatternPtr pat_update(PatternPtr base, std::string field, PatternPtr value);
PatternPtr pat_input(JsonQuery q = {});
PatternPtr pat_var(std::string name, JsonQuery q = {});

struct SplExpr;
using ExprPtr = std::shared_ptr<const SplExpr>;

/// Arrow-combinator program: invoke, sequencing, first, a transformation
/// stage, a two-way conditional and the fetch primitive.
struct SplExpr {
  enum class Kind { Invoke, Seq, First, Transform, Cond, Get };

  Kind kind = Kind::Invoke;
  std::string fn;        // Invoke
  ExprPtr a, b;          // Seq: a >>> b; First: a; Cond: branches a / b
  PatternPtr pattern;    // Transform / Cond condition
};

ExprPtr expr_invoke(std::string fn);
ExprPtr expr_seq(ExprPtr a, ExprPtr b);
ExprPtr expr_first(ExprPtr a);
ExprPtr expr_transform(PatternPtr p);
ExprPtr expr_cond(PatternPtr p, ExprPtr then_e, ExprPtr else_e);
ExprPtr expr_get();

struct Kont;
using KontPtr = std::shared_ptr<const Kont>;

/// CK-machine continuation; every chain terminates in Return(x).
struct Kont {
  enum class Kind { Return, SeqK, FirstK };

  Kind kind = Kind::Return;
  std::uint64_t x = 0;   // Return: the program request to answer
  ExprPtr expr;          // SeqK: the expression still to run
  JsonValue value;       // FirstK: the stashed second tuple component
  KontPtr next;
};

KontPtr kont_return(std::uint64_t x);
KontPtr kont_seq(ExprPtr e, KontPtr next);
KontPtr kont_first(JsonValue v, KontPtr next);

std::size_t node_count(const PatternPtr& p);
std::size_t node_count(const ExprPtr& e);

}  // namespace llab::spl

#endif  // LLAB_SPL_AST_HPP_
