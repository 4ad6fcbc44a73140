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

#include "llab/spl/text.hpp"

#include <cctype>
#include <cstdlib>

namespace llab::spl::text {

Lexer::Lexer(const std::string& src) : src_(src) { advance(); }

void Lexer::fail(const std::string& msg) const {
  throw ParseError(msg, current_.line, current_.column);
}

Token Lexer::next() {
  Token t = current_;
  advance();
  return t;
}

bool Lexer::at(const char* punct) const {
  return current_.kind == Token::Kind::Punct && current_.text == punct;
}

bool Lexer::at_ident(const char* word) const {
  return current_.kind == Token::Kind::Ident && current_.text == word;
}

Token Lexer::expect(const char* punct) {
  if (!at(punct)) fail(std::string("expected '") + punct + "'");
  return next();
}

Token Lexer::expect_ident() {
  if (current_.kind != Token::Kind::Ident) fail("expected an identifier");
  return next();
}

void Lexer::advance() {
  // Skip whitespace and // comments.
  while (pos_ < src_.size()) {
    char c = src_[pos_];
    if (c == '\n') {
      ++line_;
      column_ = 1;
      ++pos_;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++column_;
      ++pos_;
    } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
      while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
    } else {
      break;
    }
  }
  current_ = Token{};
  current_.line = line_;
  current_.column = column_;
  if (pos_ >= src_.size()) {
    current_.kind = Token::Kind::End;
    current_.text = "<end of input>";
    return;
  }
  char c = src_[pos_];
  auto take = [&](std::size_t n) {
    std::string s = src_.substr(pos_, n);
    pos_ += n;
    column_ += static_cast<int>(n);
    return s;
  };
  if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
    std::size_t n = 0;
    while (pos_ + n < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_ + n])) || src_[pos_ + n] == '_'))
      ++n;
    current_.kind = Token::Kind::Ident;
    current_.text = take(n);
    return;
  }
  if (std::isdigit(static_cast<unsigned char>(c))) {
    std::size_t n = 0;
    bool is_float = false;
    while (pos_ + n < src_.size()) {
      char d = src_[pos_ + n];
      if (std::isdigit(static_cast<unsigned char>(d))) {
        ++n;
      } else if (d == '.' && pos_ + n + 1 < src_.size() &&
                 std::isdigit(static_cast<unsigned char>(src_[pos_ + n + 1]))) {
        is_float = true;
        ++n;
      } else {
        break;
      }
    }
    std::string s = take(n);
    current_.kind = Token::Kind::Number;
    current_.text = s;
    current_.number = is_float ? JsonValue(std::strtod(s.c_str(), nullptr))
                               : JsonValue(std::strtoll(s.c_str(), nullptr, 10));
    return;
  }
  if (c == '"') {
    std::string out;
    std::size_t i = pos_ + 1;
    while (i < src_.size() && src_[i] != '"') {
      if (src_[i] == '\\' && i + 1 < src_.size()) {
        char e = src_[i + 1];
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '\\': out += '\\'; break;
          case '"': out += '"'; break;
          default: out += e; break;
        }
        i += 2;
      } else {
        out += src_[i++];
      }
    }
    if (i >= src_.size()) fail("unterminated string literal");
    std::size_t consumed = i + 1 - pos_;
    take(consumed);
    current_.kind = Token::Kind::String;
    current_.text = out;
    return;
  }
  // Multi-character punctuation first.
  static const char* puncts[] = {">>>", "<-", "->", "==", "!=", "<=", ">=", "&&", "||"};
  for (const char* p : puncts) {
    std::size_t len = std::char_traits<char>::length(p);
    if (src_.compare(pos_, len, p) == 0) {
      current_.kind = Token::Kind::Punct;
      current_.text = take(len);
      return;
    }
  }
  current_.kind = Token::Kind::Punct;
  current_.text = take(1);
}

}  // namespace llab::spl::text

namespace llab::spl {

using text::Lexer;
using text::Token;

namespace {

bool is_keyword(const std::string& s) {
  return s == "invoke" || s == "first" || s == "get" || s == "if" || s == "then" ||
         s == "else" || s == "true" || s == "false" || s == "null" || s == "in" || s == "ret";
}

class PatternParser {
 public:
  PatternParser(Lexer& lex, bool allow_vars) : lex_(lex), allow_vars_(allow_vars) {}

  PatternPtr parse() { return parse_or(); }

 private:
  PatternPtr parse_or() {
    PatternPtr p = parse_and();
    while (lex_.at("||")) {
      lex_.next();
      p = pat_binop("||", p, parse_and());
    }
    return p;
  }

  PatternPtr parse_and() {
    PatternPtr p = parse_cmp();
    while (lex_.at("&&")) {
      lex_.next();
      p = pat_binop("&&", p, parse_cmp());
    }
    return p;
  }

  PatternPtr parse_cmp() {
    PatternPtr p = parse_add();
    for (const char* op : {"==", "!=", "<=", ">=", "<", ">"}) {
      if (lex_.at(op)) {
        lex_.next();
        return pat_binop(op, p, parse_add());
      }
    }
    return p;
  }

  PatternPtr parse_add() {
    PatternPtr p = parse_mul();
    while (lex_.at("+") || lex_.at("-")) {
      std::string op = lex_.next().text;
      p = pat_binop(op, p, parse_mul());
    }
    return p;
  }

  PatternPtr parse_mul() {
    PatternPtr p = parse_postfix();
    while (lex_.at("*")) {
      lex_.next();
      p = pat_binop("*", p, parse_postfix());
    }
    return p;
  }

  PatternPtr parse_postfix() {
    PatternPtr p = parse_prim();
    for (;;) {
      if (lex_.at(".")) {
        lex_.next();
        Token field = lex_.expect_ident();
        p = append_query_step(p, JsonQuery::key(field.text));
      } else if (lex_.at("[")) {
        lex_.next();
        if (lex_.peek().kind == Token::Kind::Number) {
          Token idx = lex_.next();
          lex_.expect("]");
          p = append_query_step(p, JsonQuery::at(idx.number.get<long>()));
        } else if (lex_.peek().kind == Token::Kind::Ident ||
                   lex_.peek().kind == Token::Kind::String) {
          Token field = lex_.next();
          lex_.expect("->");
          PatternPtr value = parse();
          lex_.expect("]");
          p = pat_update(p, field.text, value);
        } else {
          lex_.fail("expected an index or a field update after '['");
        }
      } else {
        break;
      }
    }
    return p;
  }

  PatternPtr append_query_step(const PatternPtr& p, JsonQuery::Step step) {
    if (p->kind == JsonPattern::Kind::Input || p->kind == JsonPattern::Kind::Var) {
      JsonPattern copy = *p;
      copy.query.steps.push_back(std::move(step));
      return std::make_shared<const JsonPattern>(std::move(copy));
    }
    lex_.fail("query steps only apply to 'in' or a variable");
  }

  PatternPtr parse_prim() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Token::Kind::Number:
        return pat_literal(lex_.next().number);
      case Token::Kind::String:
        return pat_literal(JsonValue(lex_.next().text));
      case Token::Kind::Ident: {
        if (t.text == "true") { lex_.next(); return pat_literal(true); }
        if (t.text == "false") { lex_.next(); return pat_literal(false); }
        if (t.text == "null") { lex_.next(); return pat_literal(nullptr); }
        if (t.text == "in") { lex_.next(); return pat_input(); }
        if (t.text == "if") {
          lex_.next();
          lex_.expect("(");
          PatternPtr c = parse();
          lex_.expect(")");
          if (!lex_.at_ident("then")) lex_.fail("expected 'then'");
          lex_.next();
          PatternPtr a = parse();
          if (!lex_.at_ident("else")) lex_.fail("expected 'else'");
          lex_.next();
          PatternPtr b = parse();
          return pat_if(c, a, b);
        }
        if (is_keyword(t.text)) lex_.fail("unexpected keyword '" + t.text + "' in pattern");
        if (!allow_vars_) lex_.fail("unknown identifier '" + t.text + "' in pattern");
        return pat_var(lex_.next().text);
      }
      case Token::Kind::Punct: {
        if (t.text == "-") {
          lex_.next();
          if (lex_.peek().kind != Token::Kind::Number) lex_.fail("expected a number after '-'");
          JsonValue n = lex_.next().number;
          if (n.is_number_integer()) return pat_literal(-n.get<long long>());
          return pat_literal(-n.get<double>());
        }
        if (t.text == "[") {
          lex_.next();
          std::vector<PatternPtr> items;
          if (!lex_.at("]")) {
            items.push_back(parse());
            while (lex_.at(",")) {
              lex_.next();
              items.push_back(parse());
            }
          }
          lex_.expect("]");
          return pat_array(std::move(items));
        }
        if (t.text == "{") {
          lex_.next();
          std::vector<std::pair<std::string, PatternPtr>> fields;
          if (!lex_.at("}")) {
            for (;;) {
              Token key = lex_.peek().kind == Token::Kind::String ? lex_.next()
                                                                  : lex_.expect_ident();
              lex_.expect(":");
              fields.emplace_back(key.text, parse());
              if (!lex_.at(",")) break;
              lex_.next();
            }
          }
          lex_.expect("}");
          return pat_object(std::move(fields));
        }
        if (t.text == "(") {
          lex_.next();
          PatternPtr p = parse();
          lex_.expect(")");
          return p;
        }
        break;
      }
      case Token::Kind::End:
        break;
    }
    lex_.fail("expected a pattern");
  }

  Lexer& lex_;
  bool allow_vars_;
};

class ExprParser {
 public:
  explicit ExprParser(Lexer& lex) : lex_(lex) {}

  ExprPtr parse() {
    ExprPtr e = parse_atom();
    while (lex_.at(">>>")) {
      lex_.next();
      e = expr_seq(e, parse_atom());
    }
    return e;
  }

 private:
  ExprPtr parse_atom() {
    if (lex_.at_ident("invoke")) {
      lex_.next();
      return expr_invoke(lex_.expect_ident().text);
    }
    if (lex_.at_ident("first")) {
      lex_.next();
      lex_.expect("(");
      ExprPtr inner = parse();
      lex_.expect(")");
      return expr_first(inner);
    }
    if (lex_.at_ident("get")) {
      lex_.next();
      return expr_get();
    }
    if (lex_.at_ident("if")) {
      lex_.next();
      lex_.expect("(");
      PatternParser pp(lex_, false);
      PatternPtr cond = pp.parse();
      lex_.expect(")");
      if (!lex_.at_ident("then")) lex_.fail("expected 'then'");
      lex_.next();
      lex_.expect("(");
      ExprPtr a = parse();
      lex_.expect(")");
      if (!lex_.at_ident("else")) lex_.fail("expected 'else'");
      lex_.next();
      lex_.expect("(");
      ExprPtr b = parse();
      lex_.expect(")");
      return expr_cond(cond, a, b);
    }
    PatternParser pp(lex_, false);
    return expr_transform(pp.parse());
  }

  Lexer& lex_;
};

}  // namespace

ExprPtr parse_expr(const std::string& src) {
  Lexer lex(src);
  ExprParser parser(lex);
  ExprPtr e = parser.parse();
  if (lex.peek().kind != Token::Kind::End) lex.fail("trailing input after program");
  return e;
}

PatternPtr parse_pattern(const std::string& src, bool allow_vars) {
  Lexer lex(src);
  PatternParser parser(lex, allow_vars);
  PatternPtr p = parser.parse();
  if (lex.peek().kind != Token::Kind::End) lex.fail("trailing input after pattern");
  return p;
}

// --- printing ----------------------------------------------------------------

namespace {

int op_precedence(const std::string& op) {
  if (op == "||") return 1;
  if (op == "&&") return 2;
  if (op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=") return 3;
  if (op == "+" || op == "-") return 4;
  return 5;  // *
}

bool ident_like(const std::string& s) {
  if (s.empty() || is_keyword(s)) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

std::string pattern_text(const JsonPattern& p, int parent_prec);

std::string child_text(const PatternPtr& p, int parent_prec) {
  return pattern_text(*p, parent_prec);
}

std::string pattern_text(const JsonPattern& p, int parent_prec) {
  switch (p.kind) {
    case JsonPattern::Kind::Literal:
      return p.literal.dump();
    case JsonPattern::Kind::Array: {
      std::string out = "[";
      for (std::size_t i = 0; i < p.items.size(); ++i) {
        if (i) out += ", ";
        out += child_text(p.items[i], 0);
      }
      return out + "]";
    }
    case JsonPattern::Kind::Object: {
      if (p.fields.empty()) return "{}";
      std::string out = "{ ";
      for (std::size_t i = 0; i < p.fields.size(); ++i) {
        if (i) out += ", ";
        const auto& [k, v] = p.fields[i];
        out += ident_like(k) ? k : JsonValue(k).dump();
        out += ": " + child_text(v, 0);
      }
      return out + " }";
    }
    case JsonPattern::Kind::BinOp: {
      int prec = op_precedence(p.op);
      // Left-associative: the right operand needs parens at equal precedence.
      std::string l = child_text(p.lhs, prec);
      std::string r = child_text(p.rhs, prec + 1);
      std::string out = l + " " + p.op + " " + r;
      if (prec < parent_prec) return "(" + out + ")";
      return out;
    }
    case JsonPattern::Kind::If: {
      std::string out = "if (" + child_text(p.cond, 0) + ") then " +
                        child_text(p.then_p, 6) + " else " + child_text(p.else_p, 6);
      if (parent_prec > 0) return "(" + out + ")";
      return out;
    }
    case JsonPattern::Kind::UpdateField: {
      std::string base = child_text(p.base, 6);
      std::string key = ident_like(p.field) ? p.field : JsonValue(p.field).dump();
      return base + "[" + key + " -> " + child_text(p.value_p, 0) + "]";
    }
    case JsonPattern::Kind::Input:
      return "in" + p.query.to_text();
    case JsonPattern::Kind::Var:
      return p.var + p.query.to_text();
  }
  return "?";
}

std::string expr_text(const SplExpr& e) {
  switch (e.kind) {
    case SplExpr::Kind::Invoke:
      return "invoke " + e.fn;
    case SplExpr::Kind::Seq:
      return expr_text(*e.a) + " >>> " + expr_text(*e.b);
    case SplExpr::Kind::First:
      return "first (" + expr_text(*e.a) + ")";
    case SplExpr::Kind::Transform: {
      // A bare if-pattern at stage level would parse as a conditional.
      if (e.pattern->kind == JsonPattern::Kind::If)
        return "(" + pattern_text(*e.pattern, 0) + ")";
      return pattern_text(*e.pattern, 0);
    }
    case SplExpr::Kind::Cond:
      return "if (" + pattern_text(*e.pattern, 0) + ") then (" + expr_text(*e.a) +
             ") else (" + expr_text(*e.b) + ")";
    case SplExpr::Kind::Get:
      return "get";
  }
  return "?";
}

}  // namespace

std::string to_text(const ExprPtr& e) { return e ? expr_text(*e) : "<null>"; }

std::string to_text(const PatternPtr& p) { return p ? pattern_text(*p, 0) : "<null>"; }

std::string to_text(const KontPtr& k) {
  if (!k) return "<null>";
  switch (k->kind) {
    case Kont::Kind::Return:
      return "ret x" + std::to_string(k->x);
    case Kont::Kind::SeqK:
      return "seq(" + to_text(k->expr) + ", " + to_text(k->next) + ")";
    case Kont::Kind::FirstK:
      return "first(" + k->value.dump() + ", " + to_text(k->next) + ")";
  }
  return "?";
}

}  // namespace llab::spl
