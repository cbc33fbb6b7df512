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

#ifndef DEEPGP_RATES_HPP
#define DEEPGP_RATES_HPP

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "structure.hpp"

// Closed-form rate calculus: downstream smoothness exponents, minimax rates,
// per-family solutions eps_n(alpha, beta, r) of the concentration function
// inequality, the structure rate eps_n(eta) and the structure penalty.
namespace deepgp {

enum class Family { TruncatedWavelet, LevyFbm, RescaledStationary };

Family family_from_string(const std::string& name);
std::string to_string(Family f);

/// Per-family constants entering eps_n(alpha, beta, r).
///
/// Some of these are only known to exist (they come from small-ball
/// estimates in the literature), so they are configuration rather than code.
struct RateProfile {
  Family family = Family::TruncatedWavelet;
  double holder_radius = 1.0;   ///< K
  double besov_radius = 1.0;    ///< K' with C^beta(K) inside the Besov ball B(K')
  double stationary_c = 1.0;    ///< C(r) of the rescaled-process concentration bound
  double stationary_d = 1.0;    ///< D(r)
  double fbm_small_ball = 8.0;  ///< c_X(r)
  double fbm_rkhs = 1.0;        ///< K^2 L(beta, r)^2
  int sup_grid = 256;           ///< beta grid used for sup_beta C_j(beta, r)
  double sup_safety = 1.05;

  bool operator==(const RateProfile&) const = default;
};

json to_json(const RateProfile& p);
RateProfile profile_from_json(const json& j, const std::string& pointer = "");

/// Log of a non-negative weight; -inf encodes an exact zero.
struct LogWeight {
  double log_value = 0.0;

  static LogWeight zero() { return {-std::numeric_limits<double>::infinity()}; }
  bool is_zero() const { return log_value == -std::numeric_limits<double>::infinity(); }
  LogWeight operator*(LogWeight o) const {
    if (is_zero() || o.is_zero()) return zero();
    return {log_value + o.log_value};
  }
};

/// alpha_i = prod_{l > i} min(beta_l, 1); alpha_q = 1.
std::vector<double> alpha_exponents(std::span<const double> betas);

struct MinimaxRate {
  double rate = 0.0;
  std::vector<int> argmax;  ///< layers attaining the maximum
};

/// max_i n^{-beta_i alpha_i / (2 beta_i alpha_i + t_i)}.
MinimaxRate minimax_rate(const CompositionStructure& eta, double n);

/// Explicit metric-entropy constant of the Hoelder ball C_r^beta(K).
double entropy_constant_q1(double beta, int r, double K);
double log_entropy_constant_q1(double beta, int r, double K);

/// J_beta: nearest integer (ties away from zero) to log2(n) / (2 beta + r),
/// at least 1.
int wavelet_resolution(double n, double beta, int r);

/// a(beta, r) = n^{1/(2beta+r)} (log n)^{-(1+r)/(2beta+r)}.
double stationary_scaling(double n, double beta, int r);

/// Q_1^{beta/(2beta+r)} n^{-beta alpha/(2 beta alpha + r)}: every admissible
/// eps_n(alpha, beta, r) must dominate this.
double rate_floor(const RateProfile& p, double alpha, double beta, int r, double n);

/// The alpha = 1 solution of the truncated wavelet family,
/// K' (2^b+1)^2/(2^b-1) sqrt(r 2^r) J^{3/2} 2^{-J b}.
double wavelet_base_rate(const RateProfile& p, double beta, int r, double n);

/// C_1'(beta, r): the family constant before squaring/lifting. For the
/// wavelet family it bounds the base solution by C_1' (log n)^{3/2} n^{-b/(2b+r)}.
double family_c1_prime(const RateProfile& p, double beta, int r);

/// C_2'(beta, r) of the same representation.
double family_c2_prime(const RateProfile& p, double beta, int r);

/// Floor-free family solution of the concentration inequality.
double family_rate(const RateProfile& p, double alpha, double beta, int r, double n);

/// max(family_rate, rate_floor). Requires n >= 3 and alpha in (0, 1].
double eps_alpha(const RateProfile& p, double alpha, double beta, int r, double n);

/// (C_1(beta, r), C_2(beta, r)) with eps_alpha <= C_1 (log n)^{C_2} n^{-...}.
struct RateConstants {
  double c1 = 1.0;
  double c2 = 0.0;
};
RateConstants rate_constants(const RateProfile& p, double beta, int r);

/// max_i sup_{beta in [beta_-, beta_+]} C_j(beta, t_i), via a beta grid.
RateConstants structure_constants(const CompositionStructure& eta, const RateProfile& p);

/// eps_n(eta) = C~_1 (log n)^{C~_2} r_n(eta).
double eps_structure(const CompositionStructure& eta, const RateProfile& p, double n);

/// log e^{-Psi_n(eta)} with Psi_n = n eps_n(eta)^2 + e^{e^{|d|_1}}.
LogWeight psi_log_weight(const CompositionStructure& eta, const RateProfile& p, double n);

/// Conditioning slack 2 eps_n(alpha_i, beta_i, t_i)^{1/alpha_i} of layer i.
double layer_slack(const CompositionStructure& eta, const RateProfile& p, double n, int layer);

}  // namespace deepgp

#endif  // DEEPGP_RATES_HPP
