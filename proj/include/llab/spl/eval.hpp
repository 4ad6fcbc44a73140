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

#ifndef LLAB_SPL_EVAL_HPP_
#define LLAB_SPL_EVAL_HPP_

#include <stdexcept>
#include <string>

#include "llab/spl/ast.hpp"

namespace llab::spl {

/// Raised when a query or operator is applied to a value of the wrong shape.
/// The message names the failing step; programs running on the platform fault
/// to an error response instead of producing null.
struct TransformError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Applies the query steps left to right; the empty query returns `v`.
JsonValue json_query(const JsonQuery& q, const JsonValue& v);

/// Structural evaluation of a pattern against an input value. Pure; never
/// mutates the input; total up to TransformError.
JsonValue json_eval(const JsonPattern& p, const JsonValue& input);
JsonValue json_eval(const PatternPtr& p, const JsonValue& input);

}  // namespace llab::spl

#endif  // LLAB_SPL_EVAL_HPP_
