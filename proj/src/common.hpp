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

#ifndef DEEPGP_COMMON_HPP
#define DEEPGP_COMMON_HPP

#include <stdexcept>
#include <string>
#include <utility>

namespace deepgp {

/// Broad failure classes. The C API and the CLI map these onto status
/// and exit codes, so keep the set small.
enum class ErrorKind {
  Validation,  ///< malformed input or config (CLI exit 1)
  Domain,      ///< argument outside an operation's precondition
  Numeric,     ///< factorization failure, mixing failure, failed checks
  Resource,    ///< attempt or enumeration budget exhausted
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::string pointer = {})
      : std::runtime_error(std::move(message)),
        kind_(kind),
        pointer_(std::move(pointer)) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// JSON pointer of the offending config field, empty if not applicable.
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  ErrorKind kind_;
  std::string pointer_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string message,
                              std::string pointer = {}) {
  throw Error(kind, std::move(message), std::move(pointer));
}

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Resource: return "resource";
  }
  return "unknown";
}

}  // namespace deepgp

#endif  // DEEPGP_COMMON_HPP
