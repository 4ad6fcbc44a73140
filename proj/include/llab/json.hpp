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

#ifndef LLAB_JSON_HPP_
#define LLAB_JSON_HPP_

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

namespace llab {

/// JSON is the value domain for requests, responses, function state and the
/// key-value store. nlohmann::json keeps object keys sorted, which makes
/// dump() a canonical form (sorted keys, no insignificant whitespace).
using JsonValue = nlohmann::json;

inline std::string canonical_dump(const JsonValue& v) { return v.dump(); }

/// FNV-1a, 64 bit. Digests must be stable across runs and platforms, so we
/// avoid std::hash.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string to_hex(std::uint64_t value);

inline std::string digest_of(std::string_view data) {
  return to_hex(fnv1a64(data));
}

}  // namespace llab

#endif  // LLAB_JSON_HPP_
