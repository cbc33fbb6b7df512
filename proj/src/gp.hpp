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

#ifndef DEEPGP_GP_HPP
#define DEEPGP_GP_HPP

#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "funcspace.hpp"
#include "rates.hpp"
#include "rng.hpp"

namespace deepgp {

struct GpSpec {
  Family family = Family::TruncatedWavelet;
  double beta = 1.0;
  int r = 1;
  double n = 1000;
  int grid = 0;  ///< points per axis for grid families; 0 picks the default

  bool operator==(const GpSpec&) const = default;
};

/// 65 points per axis for r = 1, 17 for r = 2 (both odd so 0 is a node).
int default_grid(int r);

void validate_gp_spec(const GpSpec& spec);

// A centred Gaussian family written as path = A xi with xi standard normal.
// pCN moves act on xi, so the same object serves direct sampling and MCMC.
// Grid families factor their covariance once; instances are cached and
// shared, and are immutable after construction.
class GaussianFamily {
 public:
  static std::shared_ptr<const GaussianFamily> get(const GpSpec& spec);

  const GpSpec& spec() const { return spec_; }
  std::size_t latent_dim() const { return latent_dim_; }

  /// Wavelet family only: the truncation level J.
  int levels() const { return J_; }
  int grid_points() const { return m_; }

  /// Jitter that made the covariance factorable (0 for the wavelet family).
  double jitter() const { return jitter_; }

  /// Stationary rescaling a, or 0.
  double scaling() const { return scaling_; }

  std::vector<double> draw_latent(KeyedRng& rng) const;

  /// For the fBM family `release = false` drops the independent constant Z,
  /// leaving the process pinned at the origin.
  PathFunction map(std::span<const double> xi, bool release = true) const;

  PathFunction sample(KeyedRng& rng) const;

  /// Closed-form covariance E[X(u) X(v)] of a grid family, including the
  /// released constant for fBM.
  double covariance(std::span<const double> u, std::span<const double> v) const;

  explicit GaussianFamily(const GpSpec& spec);

 private:
  GpSpec spec_;
  std::size_t latent_dim_ = 0;
  int J_ = 0;
  int m_ = 0;
  double jitter_ = 0.0;
  double scaling_ = 0.0;
  std::vector<double> level_scale_;       // wavelet: 2^{-j(beta+r/2)}/sqrt(jr)
  std::vector<std::size_t> nodes_;        // grid nodes carried by the factor
  Eigen::MatrixXd chol_;                  // lower factor on those nodes
  std::size_t total_nodes_ = 0;
};

PathFunction sample_wavelet(const GpSpec& spec, KeyedRng& rng);
PathFunction sample_fbm(const GpSpec& spec, KeyedRng& rng);
PathFunction sample_stationary(const GpSpec& spec, KeyedRng& rng);

struct ConditionedSampleStats {
  int attempts = 0;
  bool accepted = false;
  double empirical_rate = 0.0;  ///< accepted / attempts
};

struct ConditionedSample {
  PathFunction path;
  std::vector<double> latent;
  ConditionedSampleStats stats;
  ConditioningCheck check;
};

/// Exact rejection sampling: attempt a uses rng.child(a).
ConditionedSample sample_conditioned(const GaussianFamily& family, const ConditioningSpec& cond,
                                     int max_attempts, const KeyedRng& rng);
ConditionedSample sample_conditioned(const GpSpec& spec, const ConditioningSpec& cond,
                                     int max_attempts, const KeyedRng& rng);

/// Fraction of `count` unconditioned draws that land in the set.
double acceptance_frequency(const GaussianFamily& family, const ConditioningSpec& cond, int count,
                            const KeyedRng& rng);

/// 1 - 4 / (2^{r K'^2} - 4), for K' > sqrt(3).
double acceptance_lower_bound(double k_prime, int r);

/// (1 + K') sqrt(2 log 2): the Besov radius that the acceptance bound refers to.
double besov_conditioning_radius(double k_prime);

/// Conditioning set of a layer: Besov ball for the wavelet family, empirical
/// Hoelder ball with the given slack for the grid families.
ConditioningSpec layer_conditioning(const RateProfile& profile, double beta, int r, double slack);

}  // namespace deepgp

#endif  // DEEPGP_GP_HPP
