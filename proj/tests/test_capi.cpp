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

#include <cmath>
#include <cstring>
#include <string>
#include <thread>

#include "deepgp/deepgp.h"

using nlohmann::json;

namespace {

const char* kStructure = R"({"dims": [1, 1], "active_sets": [[[1]]], "betas": [1.0]})";
const char* kChain = R"({"dims": [1, 1, 1, 1], "active_sets": [[[1]], [[1]], [[1]]], "betas": [0.5, 0.8, 1.0]})";

json last_error() { return json::parse(dgp_last_error()); }

std::string take(char* s) {
  std::string out(s);
  dgp_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(dgp_version()) > 0);
  CHECK(std::string(dgp_status_name(DGP_ERR_RESOURCE)) == "resource");
  CHECK(dgp_fnv1a64("a", 1) == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("structure handles") {
  dgp_structure* s = nullptr;
  REQUIRE(dgp_structure_from_json(kStructure, &s) == DGP_OK);
  int nodes = 0;
  CHECK(dgp_structure_node_count(s, &nodes) == DGP_OK);
  CHECK(nodes == 2);
  char* text = nullptr;
  REQUIRE(dgp_structure_to_json(s, &text) == DGP_OK);
  const auto j = json::parse(take(text));
  CHECK(j.at("dims") == json{1, 1});
  char* label = nullptr;
  REQUIRE(dgp_structure_label(s, &label) == DGP_OK);
  CHECK(take(label).rfind("q0_", 0) == 0);

  double rate = 0;
  CHECK(dgp_minimax_rate(s, 1000, &rate) == DGP_OK);
  CHECK(rate == doctest::Approx(0.1).epsilon(1e-12));
  dgp_structure_free(s);
}

TEST_CASE("reduction through the api keeps the rate") {
  dgp_structure* s = nullptr;
  REQUIRE(dgp_structure_from_json(kChain, &s) == DGP_OK);
  dgp_structure* r = nullptr;
  int applicable = 0;
  REQUIRE(dgp_structure_reduce(s, 1.0, &r, &applicable) == DGP_OK);
  CHECK(applicable == 1);
  int before = 0, after = 0;
  dgp_structure_node_count(s, &before);
  dgp_structure_node_count(r, &after);
  CHECK(after < before);
  for (double n : {1e3, 1e6}) {
    double a = 0, b = 0;
    dgp_minimax_rate(s, n, &a);
    dgp_minimax_rate(r, n, &b);
    CHECK(std::abs(a - b) <= 1e-12 * a);
  }
  dgp_structure_free(r);
  dgp_structure_free(s);
}

TEST_CASE("validation errors carry a pointer") {
  dgp_structure* s = nullptr;
  CHECK(dgp_structure_from_json("{", &s) == DGP_ERR_VALIDATION);
  CHECK(s == nullptr);
  CHECK(last_error().at("status") == "validation");
  CHECK(dgp_structure_from_json(R"({"dims": [1, 1], "active_sets": [[[1]]], "betas": [1.0], "colour": 1})", &s) ==
        DGP_ERR_VALIDATION);
  CHECK(last_error().at("pointer") == "/colour");
  CHECK(dgp_structure_from_json(nullptr, &s) == DGP_ERR_NULL);
  CHECK(dgp_structure_from_json(kStructure, nullptr) == DGP_ERR_NULL);
}

TEST_CASE("rates through the api") {
  dgp_structure* s = nullptr;
  REQUIRE(dgp_structure_from_json(kStructure, &s) == DGP_OK);
  dgp_profile* p = nullptr;
  REQUIRE(dgp_profile_from_json(nullptr, &p) == DGP_OK);
  double eps = 0, pen = 0, ea = 0;
  CHECK(dgp_eps_structure(s, p, 1000, &eps) == DGP_OK);
  CHECK(eps > 0);
  CHECK(dgp_log_penalty(s, p, 1000, &pen) == DGP_OK);
  CHECK(pen == doctest::Approx(-(1000 * eps * eps + std::exp(std::exp(2.0)))).epsilon(1e-12));
  CHECK(dgp_eps_alpha(p, 1.0, 1.0, 1, 1000, &ea) == DGP_OK);
  CHECK(dgp_eps_alpha(p, 1.5, 1.0, 1, 1000, &ea) == DGP_ERR_DOMAIN);

  double q1 = 0, lb = 0;
  CHECK(dgp_entropy_constant_q1(1, 1, 1, &q1) == DGP_OK);
  CHECK(std::abs(q1 / 2.07e4 - 1) < 0.01);
  CHECK(dgp_acceptance_lower_bound(2, 1, &lb) == DGP_OK);
  CHECK(lb == doctest::Approx(2.0 / 3));
  CHECK(dgp_acceptance_lower_bound(1, 1, &lb) == DGP_ERR_DOMAIN);

  dgp_profile* bad = nullptr;
  CHECK(dgp_profile_from_json(R"({"family": "brownian"})", &bad) == DGP_ERR_VALIDATION);
  dgp_profile_free(p);
  dgp_structure_free(s);
}

TEST_CASE("path sampling through the api") {
  const char* gp = R"({"family": "wavelet", "beta": 1.0, "r": 1, "n": 1000})";
  dgp_path *a = nullptr, *b = nullptr;
  int attempts = 0;
  REQUIRE(dgp_path_sample(gp, "{}", 1000, 42, &a, &attempts) == DGP_OK);
  CHECK(attempts >= 1);
  REQUIRE(dgp_path_sample(gp, "{}", 1000, 42, &b, nullptr) == DGP_OK);
  const double pts[] = {-1, -0.3, 0.2, 1};
  double va[4], vb[4];
  REQUIRE(dgp_path_eval(a, pts, 4, va) == DGP_OK);
  REQUIRE(dgp_path_eval(b, pts, 4, vb) == DGP_OK);
  for (int i = 0; i < 4; ++i) {
    CHECK(va[i] == vb[i]);
    CHECK(std::abs(va[i]) <= 1.0);
  }
  int dim = 0;
  double sup = 0, hn = 0;
  CHECK(dgp_path_dim(a, &dim) == DGP_OK);
  CHECK(dim == 1);
  CHECK(dgp_path_sup_norm(a, &sup) == DGP_OK);
  CHECK(sup <= 1.0);
  CHECK(dgp_path_holder_norm(a, 0.5, &hn) == DGP_OK);
  CHECK(hn >= 0);
  dgp_path_free(a);
  dgp_path_free(b);

  dgp_path* c = nullptr;
  CHECK(dgp_path_sample(gp, R"({"K": 1e9, "sup_bound": 0})", 20, 1, &c, nullptr) == DGP_ERR_RESOURCE);
  CHECK(std::string(last_error().at("message")).find("conditioning too tight") != std::string::npos);
  CHECK(dgp_path_sample(R"({"family": "fbm", "beta": 1.2})", nullptr, 1, 1, &c, nullptr) == DGP_ERR_DOMAIN);
}

TEST_CASE("runs through the api") {
  dgp_result* r = nullptr;
  dgp_run_options opts{1, 7, 0, "rates"};
  REQUIRE(dgp_run("verify", R"({"schema_version": 1})", &opts, &r) == DGP_OK);
  CHECK(dgp_result_seed(r) == 7);
  CHECK(dgp_result_failed_checks(r) == 0);
  REQUIRE(dgp_result_count(r) == 1);
  CHECK(std::string(dgp_result_name(r, 0)) == "verify.csv");
  size_t size = 0;
  const auto* data = dgp_result_data(r, 0, &size);
  CHECK(size > 0);
  CHECK(std::string(reinterpret_cast<const char*>(data), 5) == "suite");
  CHECK(dgp_result_name(r, 5) == nullptr);
  dgp_result_free(r);

  CHECK(dgp_run("verify", "{\"schema_version\": 1,}", nullptr, &r) == DGP_ERR_VALIDATION);
  CHECK(dgp_run("nope", R"({"schema_version": 1})", nullptr, &r) == DGP_ERR_VALIDATION);
  CHECK(dgp_run(nullptr, "{}", nullptr, &r) == DGP_ERR_NULL);
}

TEST_CASE("last error is per thread") {
  dgp_structure* s = nullptr;
  CHECK(dgp_structure_from_json("{", &s) == DGP_ERR_VALIDATION);
  const std::string mine = dgp_last_error();
  std::string theirs;
  std::thread t([&] {
    dgp_structure* x = nullptr;
    dgp_structure_from_json(R"({"dims": [1, 1]})", &x);
    theirs = dgp_last_error();
  });
  t.join();
  CHECK(std::string(dgp_last_error()) == mine);
  CHECK(theirs != mine);
}
