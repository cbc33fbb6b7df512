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

#include "deepgp/deepgp.h"

#include <cstdlib>
#include <cstring>
#include <new>

#include "experiment.hpp"
#include "io.hpp"

#ifndef DEEPGP_VERSION
#define DEEPGP_VERSION "0.0.0"
#endif

struct dgp_structure {
  deepgp::CompositionStructure eta;
};

struct dgp_profile {
  deepgp::RateProfile profile;
};

struct dgp_path {
  deepgp::PathFunction path;
};

struct dgp_result {
  deepgp::RunResult run;
};

namespace {

using deepgp::ErrorKind;
using deepgp::json;

thread_local std::string g_last_error;

dgp_status set_error(dgp_status status, const std::string& message, const std::string& pointer = {}) {
  g_last_error = json{{"status", dgp_status_name(status)}, {"message", message}, {"pointer", pointer}}.dump();
  return status;
}

dgp_status status_of(ErrorKind k) {
  switch (k) {
    case ErrorKind::Validation: return DGP_ERR_VALIDATION;
    case ErrorKind::Domain: return DGP_ERR_DOMAIN;
    case ErrorKind::Numeric: return DGP_ERR_NUMERIC;
    case ErrorKind::Resource: return DGP_ERR_RESOURCE;
  }
  return DGP_ERR_INTERNAL;
}

// Runs body and converts every exception into a status plus last-error text.
template <typename F>
dgp_status guarded(F&& body) {
  try {
    body();
    return DGP_OK;
  } catch (const deepgp::Error& e) {
    return set_error(status_of(e.kind()), e.what(), e.pointer());
  } catch (const json::parse_error& e) {
    return set_error(DGP_ERR_VALIDATION, std::string("malformed JSON: ") + e.what(), "/");
  } catch (const json::exception& e) {
    return set_error(DGP_ERR_VALIDATION, e.what());
  } catch (const std::bad_alloc&) {
    return set_error(DGP_ERR_RESOURCE, "out of memory");
  } catch (const std::exception& e) {
    return set_error(DGP_ERR_INTERNAL, e.what());
  }
}

#define DGP_REQUIRE(ptr)                                              \
  do {                                                                \
    if (!(ptr)) return set_error(DGP_ERR_NULL, #ptr " is NULL");      \
  } while (0)

json parse(const char* text) { return json::parse(text ? text : "{}"); }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

deepgp::GpSpec gp_from_json(const json& j) {
  deepgp::FieldReader r(j, "");
  deepgp::GpSpec s;
  s.family = deepgp::family_from_string(r.get<std::string>("family"));
  s.beta = r.get<double>("beta");
  s.r = r.get_or("r", s.r);
  s.n = r.get_or("n", s.n);
  s.grid = r.get_or("grid", s.grid);
  r.finish();
  deepgp::validate_gp_spec(s);
  return s;
}

}  // namespace

extern "C" {

const char* dgp_version(void) { return DEEPGP_VERSION; }

const char* dgp_last_error(void) { return g_last_error.c_str(); }

const char* dgp_status_name(dgp_status status) {
  switch (status) {
    case DGP_OK: return "ok";
    case DGP_ERR_VALIDATION: return "validation";
    case DGP_ERR_DOMAIN: return "domain";
    case DGP_ERR_NUMERIC: return "numeric";
    case DGP_ERR_RESOURCE: return "resource";
    case DGP_ERR_INTERNAL: return "internal";
    case DGP_ERR_NULL: return "null";
  }
  return "unknown";
}

uint64_t dgp_fnv1a64(const void* data, size_t size) { return deepgp::fnv1a64(data, size); }

void dgp_string_free(char* s) { std::free(s); }

dgp_status dgp_structure_from_json(const char* text, dgp_structure** out) {
  DGP_REQUIRE(text);
  DGP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto eta = deepgp::structure_from_json(parse(text));
    deepgp::require_valid(eta);
    *out = new dgp_structure{std::move(eta)};
  });
}

dgp_status dgp_structure_to_json(const dgp_structure* s, char** out) {
  DGP_REQUIRE(s);
  DGP_REQUIRE(out);
  return guarded([&] { *out = dup_string(deepgp::to_json(s->eta).dump()); });
}

dgp_status dgp_structure_node_count(const dgp_structure* s, int* out) {
  DGP_REQUIRE(s);
  DGP_REQUIRE(out);
  *out = s->eta.graph.node_count();
  return DGP_OK;
}

dgp_status dgp_structure_label(const dgp_structure* s, char** out) {
  DGP_REQUIRE(s);
  DGP_REQUIRE(out);
  return guarded([&] { *out = dup_string(deepgp::structure_label(s->eta)); });
}

dgp_status dgp_structure_reduce(const dgp_structure* s, double holder_radius, dgp_structure** out,
                                int* applicable) {
  DGP_REQUIRE(s);
  DGP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    auto red = deepgp::reduce_redundant(s->eta, holder_radius);
    if (applicable) *applicable = red.applicable ? 1 : 0;
    *out = new dgp_structure{std::move(red.structure)};
  });
}

void dgp_structure_free(dgp_structure* s) { delete s; }

dgp_status dgp_profile_from_json(const char* text, dgp_profile** out) {
  DGP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new dgp_profile{deepgp::profile_from_json(parse(text))}; });
}

void dgp_profile_free(dgp_profile* p) { delete p; }

dgp_status dgp_minimax_rate(const dgp_structure* s, double n, double* rate) {
  DGP_REQUIRE(s);
  DGP_REQUIRE(rate);
  return guarded([&] { *rate = deepgp::minimax_rate(s->eta, n).rate; });
}

dgp_status dgp_eps_structure(const dgp_structure* s, const dgp_profile* p, double n, double* out) {
  DGP_REQUIRE(s);
  DGP_REQUIRE(p);
  DGP_REQUIRE(out);
  return guarded([&] { *out = deepgp::eps_structure(s->eta, p->profile, n); });
}

dgp_status dgp_log_penalty(const dgp_structure* s, const dgp_profile* p, double n, double* out) {
  DGP_REQUIRE(s);
  DGP_REQUIRE(p);
  DGP_REQUIRE(out);
  return guarded([&] { *out = deepgp::psi_log_weight(s->eta, p->profile, n).log_value; });
}

dgp_status dgp_eps_alpha(const dgp_profile* p, double alpha, double beta, int r, double n, double* out) {
  DGP_REQUIRE(p);
  DGP_REQUIRE(out);
  return guarded([&] { *out = deepgp::eps_alpha(p->profile, alpha, beta, r, n); });
}

dgp_status dgp_entropy_constant_q1(double beta, int r, double K, double* out) {
  DGP_REQUIRE(out);
  return guarded([&] { *out = deepgp::entropy_constant_q1(beta, r, K); });
}

dgp_status dgp_acceptance_lower_bound(double k_prime, int r, double* out) {
  DGP_REQUIRE(out);
  return guarded([&] { *out = deepgp::acceptance_lower_bound(k_prime, r); });
}

dgp_status dgp_path_sample(const char* gp_json, const char* cond_json, int max_attempts, uint64_t seed,
                           dgp_path** out, int* attempts) {
  DGP_REQUIRE(gp_json);
  DGP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    const auto spec = gp_from_json(parse(gp_json));
    const deepgp::KeyedRng rng(seed, {0x70617468});
    if (!cond_json) {
      auto stream = rng.child(0);
      *out = new dgp_path{deepgp::GaussianFamily::get(spec)->sample(stream)};
      if (attempts) *attempts = 1;
      return;
    }
    deepgp::RateProfile profile;
    profile.family = spec.family;
    auto cond = deepgp::layer_conditioning(profile, spec.beta, spec.r,
                                           2.0 * deepgp::eps_alpha(profile, 1.0, spec.beta, spec.r, spec.n));
    const auto cj = parse(cond_json);
    deepgp::FieldReader r(cj, "");
    if (r.has("mode")) cond.mode = deepgp::conditioning_mode_from_string(r.get<std::string>("mode"));
    cond.K = r.get_or("K", cond.K);
    cond.slack = r.get_or("slack", cond.slack);
    cond.sup_bound = r.get_or("sup_bound", cond.sup_bound);
    cond.holder_grid = r.get_or("holder_grid", cond.holder_grid);
    r.finish();
    if (max_attempts < 1) deepgp::fail(ErrorKind::Domain, "max_attempts must be >= 1");
    auto s = deepgp::sample_conditioned(spec, cond, max_attempts, rng);
    if (attempts) *attempts = s.stats.attempts;
    *out = new dgp_path{std::move(s.path)};
  });
}

dgp_status dgp_path_eval(const dgp_path* path, const double* points, size_t count, double* out) {
  DGP_REQUIRE(path);
  if (count == 0) return DGP_OK;
  DGP_REQUIRE(points);
  DGP_REQUIRE(out);
  return guarded([&] {
    const std::size_t d = static_cast<std::size_t>(path->path.dim());
    for (std::size_t i = 0; i < count; ++i) out[i] = path->path.eval(std::span<const double>(points + i * d, d));
  });
}

dgp_status dgp_path_dim(const dgp_path* path, int* out) {
  DGP_REQUIRE(path);
  DGP_REQUIRE(out);
  *out = path->path.dim();
  return DGP_OK;
}

dgp_status dgp_path_sup_norm(const dgp_path* path, double* out) {
  DGP_REQUIRE(path);
  DGP_REQUIRE(out);
  return guarded([&] { *out = path->path.sup_norm(); });
}

dgp_status dgp_path_holder_norm(const dgp_path* path, double beta, double* out) {
  DGP_REQUIRE(path);
  DGP_REQUIRE(out);
  return guarded([&] { *out = deepgp::holder_norm_empirical(path->path, beta, 0).value; });
}

void dgp_path_free(dgp_path* path) { delete path; }

dgp_status dgp_run(const char* command, const char* config_json, const dgp_run_options* opts, dgp_result** out) {
  DGP_REQUIRE(command);
  DGP_REQUIRE(config_json);
  DGP_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    deepgp::RunOptions o;
    if (opts) {
      if (opts->has_seed) o.seed = opts->seed;
      if (opts->threads > 0) o.threads = opts->threads;
      if (opts->suite) o.suite = std::string(opts->suite);
    }
    *out = new dgp_result{deepgp::run_experiment(command, parse(config_json), o)};
  });
}

size_t dgp_result_count(const dgp_result* r) { return r ? r->run.artifacts.size() : 0; }

const char* dgp_result_name(const dgp_result* r, size_t i) {
  if (!r || i >= r->run.artifacts.size()) return nullptr;
  return r->run.artifacts[i].name.c_str();
}

const uint8_t* dgp_result_data(const dgp_result* r, size_t i, size_t* size) {
  if (!r || i >= r->run.artifacts.size()) {
    if (size) *size = 0;
    return nullptr;
  }
  const auto& bytes = r->run.artifacts[i].bytes;
  if (size) *size = bytes.size();
  return reinterpret_cast<const uint8_t*>(bytes.data());
}

int dgp_result_failed_checks(const dgp_result* r) { return r ? r->run.failed_checks() : 0; }

uint64_t dgp_result_seed(const dgp_result* r) { return r ? r->run.seed : 0; }

size_t dgp_result_warning_count(const dgp_result* r) { return r ? r->run.warnings.size() : 0; }

const char* dgp_result_warning(const dgp_result* r, size_t i) {
  if (!r || i >= r->run.warnings.size()) return nullptr;
  return r->run.warnings[i].c_str();
}

void dgp_result_free(dgp_result* r) { delete r; }

}  // extern "C"
