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

#include "llab/spl/eval.hpp"

#include <cmath>
#include <memory>

namespace llab::spl {

bool JsonQuery::prefix_of(const JsonQuery& q) const {
  if (steps.size() > q.steps.size()) return false;
  for (std::size_t i = 0; i < steps.size(); ++i)
    if (!(steps[i] == q.steps[i])) return false;
  return true;
}

JsonQuery JsonQuery::suffix_after(std::size_t n) const {
  JsonQuery out;
  for (std::size_t i = n; i < steps.size(); ++i) out.steps.push_back(steps[i]);
  return out;
}

std::string JsonQuery::to_text() const {
  std::string out;
  for (const auto& s : steps) {
    if (s.is_index)
      out += "[" + std::to_string(s.index) + "]";
    else
      out += "." + s.field;
  }
  return out;
}

namespace {

PatternPtr make(JsonPattern p) { return std::make_shared<const JsonPattern>(std::move(p)); }

}  // namespace

PatternPtr pat_literal(JsonValue v) {
  JsonPattern p;
  p.kind = JsonPattern::Kind::Literal;
  p.literal = std::move(v);
  return make(std::move(p));
}

PatternPtr pat_array(std::vector<PatternPtr> items) {
  JsonPattern p;
  p.kind = JsonPattern::Kind::Array;
  p.items = std::move(items);
  return make(std::move(p));
}

PatternPtr pat_object(std::vector<std::pair<std::string, PatternPtr>> fields) {
  JsonPattern p;
  p.kind = JsonPattern::Kind::Object;
  p.fields = std::move(fields);
  return make(std::move(p));
}

PatternPtr pat_binop(std::string op, PatternPtr lhs, PatternPtr rhs) {
  JsonPattern p;
  p.kind = JsonPattern::Kind::BinOp;
  p.op = std::move(op);
  p.lhs = std::move(lhs);
  p.rhs = std::move(rhs);
  return make(std::move(p));
}

PatternPtr pat_if(PatternPtr cond, PatternPtr then_p, PatternPtr else_p) {
  JsonPattern p;
  p.kind = JsonPattern::Kind::If;
  p.cond = std::move(cond);
  p.then_p = std::move(then_p);
  p.else_p = std::move(else_p);
  return make(std::move(p));
}

PatternPtr pat_update(PatternPtr base, std::string field, PatternPtr value) {
  JsonPattern p;
  p.kind = JsonPattern::Kind::UpdateField;
  p.base = std::move(base);
  p.field = std::move(field);
  p.value_p = std::move(value);
  return make(std::move(p));
}

PatternPtr pat_input(JsonQuery q) {
  JsonPattern p;
  p.kind = JsonPattern::Kind::Input;
  p.query = std::move(q);
  return make(std::move(p));
}

PatternPtr pat_var(std::string name, JsonQuery q) {
  JsonPattern p;
  p.kind = JsonPattern::Kind::Var;
  p.var = std::move(name);
  p.query = std::move(q);
  return make(std::move(p));
}

ExprPtr expr_invoke(std::string fn) {
  SplExpr e;
  e.kind = SplExpr::Kind::Invoke;
  e.fn = std::move(fn);
  return std::make_shared<const SplExpr>(std::move(e));
}

ExprPtr expr_seq(ExprPtr a, ExprPtr b) {
  SplExpr e;
  e.kind = SplExpr::Kind::Seq;
  e.a = std::move(a);
  e.b = std::move(b);
  return std::make_shared<const SplExpr>(std::move(e));
}

ExprPtr expr_first(ExprPtr a) {
  SplExpr e;
  e.kind = SplExpr::Kind::First;
  e.a = std::move(a);
  return std::make_shared<const SplExpr>(std::move(e));
}

ExprPtr expr_transform(PatternPtr p) {
  SplExpr e;
  e.kind = SplExpr::Kind::Transform;
  e.pattern = std::move(p);
  return std::make_shared<const SplExpr>(std::move(e));
}

ExprPtr expr_cond(PatternPtr p, ExprPtr then_e, ExprPtr else_e) {
  SplExpr e;
  e.kind = SplExpr::Kind::Cond;
  e.pattern = std::move(p);
  e.a = std::move(then_e);
  e.b = std::move(else_e);
  return std::make_shared<const SplExpr>(std::move(e));
}

ExprPtr expr_get() {
  SplExpr e;
  e.kind = SplExpr::Kind::Get;
  return std::make_shared<const SplExpr>(std::move(e));
}

KontPtr kont_return(std::uint64_t x) {
  Kont k;
  k.kind = Kont::Kind::Return;
  k.x = x;
  return std::make_shared<const Kont>(std::move(k));
}

KontPtr kont_seq(ExprPtr e, KontPtr next) {
  Kont k;
  k.kind = Kont::Kind::SeqK;
  k.expr = std::move(e);
  k.next = std::move(next);
  return std::make_shared<const Kont>(std::move(k));
}

KontPtr kont_first(JsonValue v, KontPtr next) {
  Kont k;
  k.kind = Kont::Kind::FirstK;
  k.value = std::move(v);
  k.next = std::move(next);
  return std::make_shared<const Kont>(std::move(k));
}

std::size_t node_count(const PatternPtr& p) {
  if (!p) return 0;
  std::size_t n = 1;
  switch (p->kind) {
    case JsonPattern::Kind::Literal:
      break;
    case JsonPattern::Kind::Array:
      for (const auto& it : p->items) n += node_count(it);
      break;
    case JsonPattern::Kind::Object:
      for (const auto& [k, v] : p->fields) n += node_count(v);
      break;
    case JsonPattern::Kind::BinOp:
      n += node_count(p->lhs) + node_count(p->rhs);
      break;
    case JsonPattern::Kind::If:
      n += node_count(p->cond) + node_count(p->then_p) + node_count(p->else_p);
      break;
    case JsonPattern::Kind::UpdateField:
      n += node_count(p->base) + node_count(p->value_p);
      break;
    case JsonPattern::Kind::Input:
    case JsonPattern::Kind::Var:
      n += p->query.steps.size();
      break;
  }
  return n;
}

std::size_t node_count(const ExprPtr& e) {
  if (!e) return 0;
  std::size_t n = 1;
  switch (e->kind) {
    case SplExpr::Kind::Invoke:
    case SplExpr::Kind::Get:
      break;
    case SplExpr::Kind::Seq:
      n += node_count(e->a) + node_count(e->b);
      break;
    case SplExpr::Kind::First:
      n += node_count(e->a);
      break;
    case SplExpr::Kind::Transform:
      n += node_count(e->pattern);
      break;
    case SplExpr::Kind::Cond:
      n += node_count(e->pattern) + node_count(e->a) + node_count(e->b);
      break;
  }
  return n;
}

JsonValue json_query(const JsonQuery& q, const JsonValue& v) {
  JsonValue cur = v;
  for (const auto& step : q.steps) {
    if (step.is_index) {
      if (!cur.is_array())
        throw TransformError("query step [" + std::to_string(step.index) +
                             "] applied to a non-array value");
      if (step.index < 0 || static_cast<std::size_t>(step.index) >= cur.size())
        throw TransformError("query index " + std::to_string(step.index) +
                             " out of range for array of size " + std::to_string(cur.size()));
      cur = cur[static_cast<std::size_t>(step.index)];
    } else {
      if (!cur.is_object())
        throw TransformError("query step ." + step.field + " applied to a non-object value");
      if (!cur.contains(step.field))
        throw TransformError("field '" + step.field + "' missing from object");
      cur = cur[step.field];
    }
  }
  return cur;
}

namespace {

bool both_integral(const JsonValue& a, const JsonValue& b) {
  return (a.is_number_integer() || a.is_number_unsigned()) &&
         (b.is_number_integer() || b.is_number_unsigned());
}

JsonValue arith(const std::string& op, const JsonValue& a, const JsonValue& b) {
  if (!a.is_number() || !b.is_number())
    throw TransformError("operator " + op + " requires numbers, got " +
                         std::string(a.type_name()) + " and " + std::string(b.type_name()));
  if (both_integral(a, b)) {
    long long x = a.get<long long>(), y = b.get<long long>();
    if (op == "+") return x + y;
    if (op == "-") return x - y;
    return x * y;
  }
  double x = a.get<double>(), y = b.get<double>();
  if (op == "+") return x + y;
  if (op == "-") return x - y;
  return x * y;
}

bool compare_lt(const std::string& op, const JsonValue& a, const JsonValue& b) {
  if (a.is_number() && b.is_number()) {
    double x = a.get<double>(), y = b.get<double>();
    if (op == "<") return x < y;
    if (op == "<=") return x <= y;
    if (op == ">") return x > y;
    return x >= y;
  }
  if (a.is_string() && b.is_string()) {
    const auto& x = a.get_ref<const std::string&>();
    const auto& y = b.get_ref<const std::string&>();
    if (op == "<") return x < y;
    if (op == "<=") return x <= y;
    if (op == ">") return x > y;
    return x >= y;
  }
  throw TransformError("operator " + op + " requires two numbers or two strings");
}

bool truthy(const std::string& where, const JsonValue& v) {
  if (!v.is_boolean()) throw TransformError(where + " condition is not a boolean");
  return v.get<bool>();
}

}  // namespace

JsonValue json_eval(const JsonPattern& p, const JsonValue& input) {
  switch (p.kind) {
    case JsonPattern::Kind::Literal:
      return p.literal;
    case JsonPattern::Kind::Array: {
      JsonValue out = JsonValue::array();
      for (const auto& it : p.items) out.push_back(json_eval(it, input));
      return out;
    }
    case JsonPattern::Kind::Object: {
      JsonValue out = JsonValue::object();
      for (const auto& [k, v] : p.fields) out[k] = json_eval(v, input);
      return out;
    }
    case JsonPattern::Kind::BinOp: {
      if (p.op == "&&" || p.op == "||") {
        bool l = truthy("operator " + p.op, json_eval(p.lhs, input));
        if (p.op == "&&" && !l) return false;
        if (p.op == "||" && l) return true;
        return truthy("operator " + p.op, json_eval(p.rhs, input));
      }
      JsonValue l = json_eval(p.lhs, input);
      JsonValue r = json_eval(p.rhs, input);
      if (p.op == "==") return l == r;
      if (p.op == "!=") return l != r;
      if (p.op == "<" || p.op == "<=" || p.op == ">" || p.op == ">=")
        return compare_lt(p.op, l, r);
      if (p.op == "+" || p.op == "-" || p.op == "*") return arith(p.op, l, r);
      throw TransformError("unknown operator " + p.op);
    }
    case JsonPattern::Kind::If:
      return truthy("if", json_eval(p.cond, input)) ? json_eval(p.then_p, input)
                                                    : json_eval(p.else_p, input);
    case JsonPattern::Kind::UpdateField: {
      JsonValue base = json_eval(p.base, input);
      if (!base.is_object())
        throw TransformError("field update [" + p.field + " -> ...] applied to a non-object");
      base[p.field] = json_eval(p.value_p, input);
      return base;
    }
    case JsonPattern::Kind::Input:
      return json_query(p.query, input);
    case JsonPattern::Kind::Var:
      throw TransformError("unresolved variable '" + p.var + "' in pattern");
  }
  throw TransformError("malformed pattern");
}

JsonValue json_eval(const PatternPtr& p, const JsonValue& input) {
  if (!p) throw TransformError("null pattern");
  return json_eval(*p, input);
}

}  // namespace llab::spl
