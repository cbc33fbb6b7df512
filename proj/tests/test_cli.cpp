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

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string err;
};

// Runs the CLI from `cwd` with the given arguments; captures stderr.
Outcome run(const fs::path& cwd, const std::string& args, const std::string& env = "") {
  const fs::path err = cwd / "stderr.txt";
  const std::string cmd = "cd '" + cwd.string() + "' && " + env + " '" + DEEPGP_CLI_PATH + "' " + args +
                          " > /dev/null 2> '" + err.string() + "'";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f(err);
  std::stringstream ss;
  ss << f.rdbuf();
  o.err = ss.str();
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("deepgp_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

const char* kRates = R"({"schema_version": 1, "seed": 3,
  "structure": {"dims": [1, 1], "active_sets": [[[1]]], "betas": [1.0]}, "n": [1000, 100000]})";

}  // namespace

TEST_CASE("help and usage errors") {
  TempDir d("usage");
  CHECK(run(d.path, "--help").code == 0);
  CHECK(run(d.path, "").code == 1);
  CHECK(run(d.path, "frobnicate").code == 1);
  CHECK(run(d.path, "verify --threads 0").code == 1);
  CHECK(run(d.path, "rates").code == 1);
}

TEST_CASE("verify writes a table and a manifest") {
  TempDir d("verify");
  const auto o = run(d.path, "verify --suite rates --seed 9");
  CHECK(o.code == 0);
  const fs::path out = d.path / "deepgp-out" / "verify";
  REQUIRE(fs::exists(out / "verify.csv"));
  const auto m = json::parse(slurp(out / "manifest.json"));
  CHECK(m.at("command") == "verify");
  CHECK(m.at("seed") == 9);
  CHECK(m.at("failed_checks") == 0);
  CHECK(m.at("schema_version") == 1);
  REQUIRE(m.at("artifacts").size() == 1);
  const auto& a = m.at("artifacts")[0];
  CHECK(a.at("name") == "verify.csv");
  CHECK(a.at("bytes") == fs::file_size(out / "verify.csv"));
  CHECK(a.at("fnv1a64").get<std::string>().size() == 16);
  for (const auto& e : fs::directory_iterator(out)) CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
}

TEST_CASE("threads fall back to the environment") {
  TempDir d("threads");
  CHECK(run(d.path, "verify --suite rates --out o", "DEEPGP_LAB_THREADS=3").code == 0);
  CHECK(json::parse(slurp(d.path / "o" / "manifest.json")).at("threads") == 3);
  CHECK(run(d.path, "verify --suite rates --out p --threads 2", "DEEPGP_LAB_THREADS=3").code == 0);
  CHECK(json::parse(slurp(d.path / "p" / "manifest.json")).at("threads") == 2);
}

TEST_CASE("malformed and invalid configs exit 1 with a pointer") {
  TempDir d("malformed");
  write(d.path / "bad.json", "{\"schema_version\": 1,");
  auto o = run(d.path, "rates --config bad.json");
  CHECK(o.code == 1);
  CHECK(json::parse(o.err).at("status") == "validation");

  write(d.path / "unknown.json", R"({"schema_version": 1, "structure": {"dims": [1, 1], "active_sets": [[[1]]], "betas": [1.0]}, "colour": 2})");
  o = run(d.path, "rates --config unknown.json");
  CHECK(o.code == 1);
  CHECK(json::parse(o.err).at("pointer") == "/colour");

  CHECK(run(d.path, "rates --config missing.json").code == 1);
}

TEST_CASE("infeasible fit exits 2 with the sampler's error") {
  TempDir d("infeasible");
  // a Hoelder radius of 1e-9 leaves (almost) nothing to accept within 20 draws
  write(d.path / "fit.json", R"({"schema_version": 1,
    "prior": {"space": {"input_dim": 1, "max_q": 0, "max_width": 1}, "beta_grid": [0.5], "n": 50,
              "max_attempts": 20, "profile": {"family": "fbm", "holder_radius": 1e-9}},
    "mcmc": {"chains": 1, "iterations": 10},
    "data": {"n": 50},
    "truth": {"kind": "zero"}})");
  const auto o = run(d.path, "fit --config fit.json --out f");
  CHECK(o.code == 2);
  const auto e = json::parse(o.err);
  CHECK(e.at("status") == "resource");
  CHECK(e.at("message").get<std::string>().find("conditioning too tight") != std::string::npos);
  CHECK_FALSE(fs::exists(d.path / "f" / "manifest.json"));
}

TEST_CASE("rates output and the out field") {
  TempDir d("rates");
  json cfg = json::parse(kRates);
  cfg["out"] = "from-config";
  write(d.path / "rates.json", cfg.dump());
  CHECK(run(d.path, "rates --config rates.json").code == 0);
  const auto csv = slurp(d.path / "from-config" / "rates.csv");
  CHECK(csv.rfind("n,r_n,eps_n,log_prior_weight,argmax_layer\n", 0) == 0);
  CHECK(run(d.path, "rates --config rates.json --out again").code == 0);
  CHECK(slurp(d.path / "again" / "rates.csv") == csv);
}
