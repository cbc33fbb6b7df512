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

#ifndef DEEPGP_INFERENCE_HPP
#define DEEPGP_INFERENCE_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "prior.hpp"

namespace deepgp {

/// Maps row-major points (d coordinates each) to one value per point.
using Evaluator = std::function<std::vector<double>(std::span<const double>)>;

/// Design measure mu: uniform on [-1,1]^d, or a weighted point set.
struct Design {
  bool uniform = true;
  std::vector<double> points;   ///< row-major, grid design only
  std::vector<double> weights;  ///< sums to 1, grid design only
};

struct RegressionSample {
  int d = 1;
  std::vector<double> X;  ///< row-major n x d
  std::vector<double> Y;
  std::vector<double> truth;  ///< f*(X_i)

  std::size_t size() const { return Y.size(); }
};

/// Y_i = f*(X_i) + noise_sd * e_i. noise_sd = 1 is the model; 0 gives
/// noiseless data for diagnostics.
RegressionSample generate_data(const Evaluator& f_star, int d, std::size_t n, const Design& design,
                               const KeyedRng& rng, double noise_sd = 1.0);

/// sum_i [Y_i (f - g)(X_i) - f(X_i)^2 / 2 + g(X_i)^2 / 2].
double log_likelihood_ratio(std::span<const double> f, std::span<const double> g,
                            std::span<const double> y);

struct InfoGeometry {
  double kl = 0.0;
  double v2_upper = 0.0;
  double hellinger = 0.0;  ///< squared Hellinger distance
};

/// KL = int (f-g)^2, V2 <= int (f-g)^2 + (f-g)^4 / 4, d_H^2 = 1 - int e^{-(f-g)^2/8}.
InfoGeometry kl_v2_hellinger(std::span<const double> f, std::span<const double> g,
                             std::span<const double> weights);

/// Quadrature for L2(mu): midpoint grid for the uniform design, the design
/// points themselves otherwise.
struct Quadrature {
  int d = 1;
  std::vector<double> points;
  std::vector<double> weights;
};

Quadrature holdout_quadrature(int d, const Design& design, std::size_t max_points = 1024);

struct PosteriorConfig {
  int chains = 2;
  int iterations = 2000;
  double pcn_rho = 0.9;
  double structure_move_prob = 0.1;
  double burn_in = 0.5;
  std::uint64_t seed = 0;
  bool adapt = true;       ///< tune rho during burn-in towards 20-30% acceptance
  bool likelihood = true;  ///< false: the chain targets the prior
  int threads = 1;
};

json to_json(const PosteriorConfig& c);
PosteriorConfig posterior_config_from_json(const json& j, const std::string& pointer = "");

struct TraceRow {
  int chain = 0;
  int iteration = 0;
  std::size_t structure_id = 0;
  double loglik = 0.0;   ///< sum Y f - f^2 / 2
  double llr = 0.0;      ///< against the truth, NaN without one
  double l2_error = 0.0; ///< on the held-out quadrature, NaN without a truth
  double norm0 = 0.0;    ///< smoothness norm of node (0, 1)
  double sup0 = 0.0;     ///< sup norm of node (0, 1)
  int pcn_accepted = 0;
  int pcn_proposed = 0;
  bool structure_proposed = false;
  bool structure_accepted = false;
};

struct ChainSummary {
  double pcn_acceptance = 0.0;
  double structure_acceptance = 0.0;
  int structure_proposals = 0;
  double final_rho = 0.0;
};

struct PosteriorTrace {
  std::vector<TraceRow> rows;  ///< chain-major, iteration order
  std::vector<ChainSummary> chains;
  std::vector<std::string> structure_labels;
  int iterations = 0;
  double burn_in = 0.5;

  bool kept(const TraceRow& row) const {
    return row.iteration >= static_cast<int>(burn_in * iterations);
  }
};

struct Truth {
  Evaluator f;
  std::optional<CompositionStructure> structure;
};

PosteriorTrace run_mcmc(const RegressionSample& data, const PriorWeights& weights,
                        const StructurePriorSpec& spec, const PosteriorConfig& config,
                        const Truth* truth = nullptr, const Design& design = {});

struct ModelMass {
  double mass = 0.0;
  std::string warning;
};

/// Fraction of post-burn-in draws in M_n(C) = {eps_n(eta) <= C eps_n(eta*)},
/// intersected with {|d|_1 <= log(2 log n)} when the cap is enabled.
ModelMass model_mass(const PosteriorTrace& trace, const PriorWeights& weights,
                     const StructurePriorSpec& spec, const CompositionStructure& eta_star, double C,
                     bool node_cap = false);

/// Post-burn-in fraction of draws on one structure.
double structure_mass(const PosteriorTrace& trace, std::size_t structure_id);

struct ContractionRow {
  double n = 0.0;
  double median_error = 0.0;  ///< median over seeds of the per-run median L2 error
  double eps_n = 0.0;
  double minimax = 0.0;
  double eps_log_inflated = 0.0;  ///< eps_n (log n)^{1 + log K}
  std::vector<double> per_seed;
};

/// One synthetic-data run: data and chain keys are derived from (seed, n).
struct SeedRun {
  PosteriorTrace trace;
  double median_error = 0.0;  ///< over post-burn-in draws
};

SeedRun run_seed(const Truth& truth, int d, const StructurePriorSpec& spec, const PriorWeights& weights,
                 const PosteriorConfig& config, std::uint64_t seed, double noise_sd = 1.0);

ContractionRow contraction_point(const Truth& truth, int d, StructurePriorSpec spec,
                                 const PosteriorConfig& config, double n,
                                 std::span<const std::uint64_t> seeds);

std::vector<ContractionRow> contraction_curve(const Truth& truth, int d, const StructurePriorSpec& spec,
                                              const PosteriorConfig& config,
                                              std::span<const double> n_list,
                                              std::span<const std::uint64_t> seeds);

}  // namespace deepgp

#endif  // DEEPGP_INFERENCE_HPP
