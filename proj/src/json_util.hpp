/*
 * Copyright 2026 The deepgp-lab Authors
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

#ifndef DEEPGP_JSON_UTIL_HPP
#define DEEPGP_JSON_UTIL_HPP

#include <set>
#include <string>

#include <json.hpp>

#include "common.hpp"

namespace deepgp {

using json = nlohmann::json;

// Strict reader for one JSON object: every access records the key, and
// finish() rejects anything that was never asked for. Errors carry the JSON
// pointer of the field so the CLI can report it.
class FieldReader {
 public:
  FieldReader(const json& obj, std::string pointer)
      : obj_(obj), pointer_(std::move(pointer)) {
    if (!obj_.is_object())
      fail(ErrorKind::Validation, "expected a JSON object", where());
  }

  std::string at(const std::string& key) const { return pointer_ + "/" + key; }
  std::string where() const { return pointer_.empty() ? "/" : pointer_; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key) && !obj_.at(key).is_null();
  }

  const json& raw(const std::string& key) {
    if (!has(key)) fail(ErrorKind::Validation, "missing field '" + key + "'", at(key));
    return obj_.at(key);
  }

  template <typename T>
  T get(const std::string& key) {
    const json& v = raw(key);
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      fail(ErrorKind::Validation, "field '" + key + "' has the wrong type", at(key));
    }
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    return get<T>(key);
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key()))
        fail(ErrorKind::Validation, "unknown field '" + it.key() + "'", at(it.key()));
    }
  }

 private:
  const json& obj_;
  std::string pointer_;
  std::set<std::string> seen_;
};

inline void require(bool condition, const std::string& message,
                    const std::string& pointer = {}) {
  if (!condition) fail(ErrorKind::Validation, message, pointer);
}

}  // namespace deepgp

#endif  // DEEPGP_JSON_UTIL_HPP
