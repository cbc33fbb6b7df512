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

#ifndef DEEPGP_EXPERIMENT_HPP
#define DEEPGP_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "inference.hpp"

// Command runners behind the CLI. Each command takes a JSON config, runs to
// completion in memory and returns its artifacts as (name, bytes) pairs; the
// caller decides where and how to write them.
namespace deepgp {

struct Artifact {
  std::string name;
  std::string bytes;
};

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  double value = 0.0;  ///< observed statistic (worst case over trials)
  double bound = 0.0;  ///< what it was compared against
  std::string detail;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;  ///< overrides the config's "seed"
  std::optional<int> threads;         ///< overrides the config's "threads"
  std::optional<std::string> suite;   ///< verify only
};

struct RunResult {
  std::vector<Artifact> artifacts;
  std::vector<CheckResult> checks;
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;

  int failed_checks() const;
};

const std::vector<std::string>& command_names();

/// Runs one command. Config fields shared by every command: schema_version
/// (required, 1), seed, threads, out (the latter is only read by the CLI).
RunResult run_experiment(const std::string& command, const json& config, const RunOptions& options = {});

/// "rates", "funcspace", "gp", "prior", "inference" or "all".
std::vector<CheckResult> run_verify_suite(const std::string& suite, std::uint64_t seed);

/// One row per check: suite,check,passed,value,bound,detail.
std::string checks_csv(const std::vector<CheckResult>& checks);

}  // namespace deepgp

#endif  // DEEPGP_EXPERIMENT_HPP
