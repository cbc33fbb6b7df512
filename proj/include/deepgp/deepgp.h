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

#ifndef DEEPGP_DEEPGP_H
#define DEEPGP_DEEPGP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(DEEPGP_BUILDING)
#    define DGP_API __declspec(dllexport)
#  else
#    define DGP_API __declspec(dllimport)
#  endif
#else
#  define DGP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status. On failure, dgp_last_error() holds a
 * one-line JSON object {"status": ..., "message": ..., "pointer": ...} for
 * the calling thread until its next failing call. */
typedef enum dgp_status {
  DGP_OK = 0,
  DGP_ERR_VALIDATION = 1, /* malformed input or config */
  DGP_ERR_DOMAIN = 2,     /* argument outside an operation's precondition */
  DGP_ERR_NUMERIC = 3,    /* factorization or mixing failure */
  DGP_ERR_RESOURCE = 4,   /* attempt or enumeration budget exhausted */
  DGP_ERR_INTERNAL = 5,
  DGP_ERR_NULL = 6        /* a required pointer argument was NULL */
} dgp_status;

typedef struct dgp_structure dgp_structure;
typedef struct dgp_profile dgp_profile;
typedef struct dgp_path dgp_path;
typedef struct dgp_result dgp_result;

DGP_API const char* dgp_version(void);
DGP_API const char* dgp_last_error(void);
DGP_API const char* dgp_status_name(dgp_status status);

/* 64-bit FNV-1a, used for config hashes. */
DGP_API uint64_t dgp_fnv1a64(const void* data, size_t size);

/* Strings returned through char** are owned by the caller. */
DGP_API void dgp_string_free(char* s);

/* ---- composition structures ---------------------------------------- */

/* {"dims": [...], "active_sets": [[[...], ...], ...], "betas": [...],
 *  "beta_bounds": [lo, hi]}. The structure is validated. */
DGP_API dgp_status dgp_structure_from_json(const char* json, dgp_structure** out);
DGP_API dgp_status dgp_structure_to_json(const dgp_structure* s, char** out);
DGP_API dgp_status dgp_structure_node_count(const dgp_structure* s, int* out);
DGP_API dgp_status dgp_structure_label(const dgp_structure* s, char** out);
/* Collapses consecutive one-dimensional layers; *applicable is 0 when the
 * reduction does not apply and *out is then a copy of s. */
DGP_API dgp_status dgp_structure_reduce(const dgp_structure* s, double holder_radius, dgp_structure** out,
                                        int* applicable);
DGP_API void dgp_structure_free(dgp_structure* s);

/* ---- rate profiles and rates ---------------------------------------- */

/* NULL or "{}" gives the default profile. */
DGP_API dgp_status dgp_profile_from_json(const char* json, dgp_profile** out);
DGP_API void dgp_profile_free(dgp_profile* p);

DGP_API dgp_status dgp_minimax_rate(const dgp_structure* s, double n, double* rate);
DGP_API dgp_status dgp_eps_structure(const dgp_structure* s, const dgp_profile* p, double n, double* out);
/* log e^{-Psi_n}; -inf when the weight underflows to zero. */
DGP_API dgp_status dgp_log_penalty(const dgp_structure* s, const dgp_profile* p, double n, double* out);
DGP_API dgp_status dgp_eps_alpha(const dgp_profile* p, double alpha, double beta, int r, double n,
                                 double* out);
DGP_API dgp_status dgp_entropy_constant_q1(double beta, int r, double K, double* out);
DGP_API dgp_status dgp_acceptance_lower_bound(double k_prime, int r, double* out);

/* ---- sample paths --------------------------------------------------- */

/* gp_json: {"family", "beta", "r", "n", "grid"}.
 * cond_json: NULL for an unconditioned draw, otherwise {"mode", "K",
 * "slack", "sup_bound", "holder_grid"}; absent fields take the family's
 * default conditioning set. *attempts may be NULL. */
DGP_API dgp_status dgp_path_sample(const char* gp_json, const char* cond_json, int max_attempts, uint64_t seed,
                                   dgp_path** out, int* attempts);
/* points: count points with dim coordinates each, row-major. */
DGP_API dgp_status dgp_path_eval(const dgp_path* path, const double* points, size_t count, double* out);
DGP_API dgp_status dgp_path_dim(const dgp_path* path, int* out);
DGP_API dgp_status dgp_path_sup_norm(const dgp_path* path, double* out);
DGP_API dgp_status dgp_path_holder_norm(const dgp_path* path, double beta, double* out);
DGP_API void dgp_path_free(dgp_path* path);

/* ---- experiment commands -------------------------------------------- */

typedef struct dgp_run_options {
  int has_seed;      /* nonzero: seed overrides the config's "seed" */
  uint64_t seed;
  int threads;       /* > 0 overrides the config's "threads" */
  const char* suite; /* verify only; NULL keeps the config's */
} dgp_run_options;

/* command: rates, sample, prior, fit, diagnose or verify. opts may be NULL. */
DGP_API dgp_status dgp_run(const char* command, const char* config_json, const dgp_run_options* opts,
                           dgp_result** out);
DGP_API size_t dgp_result_count(const dgp_result* r);
DGP_API const char* dgp_result_name(const dgp_result* r, size_t i);
DGP_API const uint8_t* dgp_result_data(const dgp_result* r, size_t i, size_t* size);
DGP_API int dgp_result_failed_checks(const dgp_result* r);
DGP_API uint64_t dgp_result_seed(const dgp_result* r);
DGP_API size_t dgp_result_warning_count(const dgp_result* r);
DGP_API const char* dgp_result_warning(const dgp_result* r, size_t i);
DGP_API void dgp_result_free(dgp_result* r);

#ifdef __cplusplus
}
#endif

#endif /* DEEPGP_DEEPGP_H */
