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

#ifndef LLAB_SPL_TEXT_HPP_
#define LLAB_SPL_TEXT_HPP_

#include <stdexcept>
#include <string>

#include "llab/spl/ast.hpp"

namespace llab::spl {

struct ParseError : std::runtime_error {
  int line, column;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " at " + std::to_string(line_) + ":" + std::to_string(col_)),
        line(line_),
        column(col_) {}
};

/// Core program text, e.g.
///   [in, { input: in }] >>> first (invoke f) >>> in[0]
ExprPtr parse_expr(const std::string& text);

/// Pattern text; `allow_vars` admits bare identifiers (surface programs only).
PatternPtr parse_pattern(const std::string& text, bool allow_vars = false);

std::string to_text(const ExprPtr& e);
std::string to_text(const PatternPtr& p);
std::string to_text(const KontPtr& k);

}  // namespace llab::spl

namespace llab::spl::text {

/// Shared lexer for core SPL and the surface syntax.
struct Token {
  enum class Kind {
    Ident, Number, String, Punct, End,
  };
  Kind kind = Kind::End;
  std::string text;      // Ident / Punct spelling, String contents
  JsonValue number;      // Number value
  int line = 1, column = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src);

  const Token& peek() const { return current_; }
  Token next();
  bool at(const char* punct) const;
  bool at_ident(const char* word) const;
  /// Consumes the expected punctuation or fails with a ParseError.
  Token expect(const char* punct);
  Token expect_ident();
  [[noreturn]] void fail(const std::string& msg) const;

 private:
  void advance();
  std::string src_;
  std::size_t pos_ = 0;
  int line_ = 1, column_ = 1;
  Token current_;
};

}  // namespace llab::spl::text

#endif  // LLAB_SPL_TEXT_HPP_
