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

// deepgp-lab: command-line front end. Talks to the library only through the
// C API; JSON here is for reading the "out" field and writing the manifest.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <unistd.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "deepgp/deepgp.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitFailure = 2;

void report(const std::string& status, const std::string& message, const std::string& pointer = "") {
  std::cerr << json{{"status", status}, {"message", message}, {"pointer", pointer}}.dump() << std::endl;
}

int exit_code(dgp_status s) {
  return (s == DGP_ERR_VALIDATION || s == DGP_ERR_NULL) ? kExitValidation : kExitFailure;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex;
  ss.width(16);
  ss.fill('0');
  ss << v;
  return ss.str();
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// temp file in the target directory, then rename: readers never see a
// partially written artifact
void write_atomic(const fs::path& target, const void* data, std::size_t size) {
  const fs::path tmp = target.parent_path() / ("." + target.filename().string() + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
    if (!f) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out;
  std::string suite;
};

std::optional<int> env_threads() {
  const char* v = std::getenv("DEEPGP_LAB_THREADS");
  if (!v || !*v) return std::nullopt;
  char* end = nullptr;
  const long k = std::strtol(v, &end, 10);
  if (*end != '\0' || k < 1 || k > 1024) return std::nullopt;
  return static_cast<int>(k);
}

int run_command(const std::string& command, const Options& opt) {
  std::string text;
  if (!opt.config.empty()) {
    std::ifstream f(opt.config, std::ios::binary);
    if (!f) {
      report("validation", "cannot read config '" + opt.config + "'");
      return kExitValidation;
    }
    std::ostringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  } else if (command == "verify") {
    text = R"({"schema_version": 1})";
  } else {
    report("validation", "--config is required for '" + command + "'");
    return kExitValidation;
  }

  // the library validates the config; here we only peek at "out"
  fs::path out_dir = opt.out;
  if (out_dir.empty()) {
    const auto peek = json::parse(text, nullptr, false);
    if (peek.is_object() && peek.contains("out") && peek["out"].is_string())
      out_dir = peek["out"].get<std::string>();
    else
      out_dir = fs::path("deepgp-out") / command;
  }

  dgp_run_options ro{};
  if (opt.seed) {
    ro.has_seed = 1;
    ro.seed = *opt.seed;
  }
  const auto threads = opt.threads ? opt.threads : env_threads();
  ro.threads = threads ? *threads : 0;
  ro.suite = opt.suite.empty() ? nullptr : opt.suite.c_str();

  dgp_result* result = nullptr;
  const dgp_status st = dgp_run(command.c_str(), text.c_str(), &ro, &result);
  if (st != DGP_OK) {
    std::cerr << dgp_last_error() << std::endl;
    return exit_code(st);
  }

  json artifacts = json::array();
  try {
    fs::create_directories(out_dir);
    for (std::size_t i = 0; i < dgp_result_count(result); ++i) {
      std::size_t size = 0;
      const auto* data = dgp_result_data(result, i, &size);
      const std::string name = dgp_result_name(result, i);
      write_atomic(out_dir / name, data, size);
      artifacts.push_back({{"name", name}, {"bytes", size}, {"fnv1a64", hex64(dgp_fnv1a64(data, size))},
                           {"format_version", 1}});
    }
    json warnings = json::array();
    for (std::size_t i = 0; i < dgp_result_warning_count(result); ++i)
      warnings.push_back(dgp_result_warning(result, i));
    const json manifest{{"tool", "deepgp-lab"},
                        {"version", dgp_version()},
                        {"command", command},
                        {"config", opt.config},
                        {"config_hash", hex64(dgp_fnv1a64(text.data(), text.size()))},
                        {"seed", dgp_result_seed(result)},
                        {"threads", ro.threads > 0 ? ro.threads : 1},
                        {"schema_version", 1},
                        {"timestamp", utc_timestamp()},
                        {"artifacts", artifacts},
                        {"warnings", warnings},
                        {"failed_checks", dgp_result_failed_checks(result)}};
    const std::string m = manifest.dump(2) + "\n";
    write_atomic(out_dir / "manifest.json", m.data(), m.size());
  } catch (const std::exception& e) {
    dgp_result_free(result);
    report("resource", e.what());
    return kExitFailure;
  }

  for (std::size_t i = 0; i < dgp_result_warning_count(result); ++i)
    std::cerr << "warning: " << dgp_result_warning(result, i) << "\n";
  const int failed = dgp_result_failed_checks(result);
  std::cout << command << ": wrote " << dgp_result_count(result) << " artifacts to " << out_dir.string() << "\n";
  dgp_result_free(result);
  if (failed > 0) {
    report("numeric", std::to_string(failed) + " verification checks failed");
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deepgp-lab: deep Gaussian process prior simulation and verification"};
  app.set_version_flag("--version", std::string(dgp_version()));
  app.require_subcommand(1);

  Options opt;
  const char* help[][2] = {
      {"rates", "closed-form rates of a composition structure over an n list"},
      {"sample", "seeded (conditioned) Gaussian process sample paths"},
      {"prior", "structure prior weights and deep GP prior draws"},
      {"fit", "posterior MCMC on data or a synthetic truth"},
      {"diagnose", "model-mass and contraction tables"},
      {"verify", "property-check suites"},
  };
  std::string chosen;
  for (const auto& h : help) {
    auto* sub = app.add_subcommand(h[0], h[1]);
    sub->add_option("--config", opt.config, "JSON config file");
    sub->add_option("--seed", opt.seed, "experiment seed (overrides the config)");
    sub->add_option("--threads", opt.threads, "worker threads (falls back to DEEPGP_LAB_THREADS)")
        ->check(CLI::Range(1, 1024));
    sub->add_option("--out", opt.out, "output directory");
    if (std::string(h[0]) == "verify")
      sub->add_option("--suite", opt.suite, "rates, funcspace, gp, prior, inference or all");
    sub->callback([&chosen, name = std::string(h[0])] { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }
  return run_command(chosen, opt);
}
