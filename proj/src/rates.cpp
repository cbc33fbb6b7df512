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

#include "rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace deepgp {

Family family_from_string(const std::string& name) {
  if (name == "wavelet" || name == "truncated_wavelet") return Family::TruncatedWavelet;
  if (name == "fbm" || name == "levy_fbm") return Family::LevyFbm;
  if (name == "stationary" || name == "rescaled_stationary") return Family::RescaledStationary;
  fail(ErrorKind::Validation, "unknown GP family '" + name + "'");
}

std::string to_string(Family f) {
  switch (f) {
    case Family::TruncatedWavelet: return "wavelet";
    case Family::LevyFbm: return "fbm";
    case Family::RescaledStationary: return "stationary";
  }
  return "wavelet";
}

json to_json(const RateProfile& p) {
  return json{{"family", to_string(p.family)},
              {"holder_radius", p.holder_radius},
              {"besov_radius", p.besov_radius},
              {"stationary_c", p.stationary_c},
              {"stationary_d", p.stationary_d},
              {"fbm_small_ball", p.fbm_small_ball},
              {"fbm_rkhs", p.fbm_rkhs},
              {"sup_grid", p.sup_grid},
              {"sup_safety", p.sup_safety}};
}

RateProfile profile_from_json(const json& j, const std::string& pointer) {
  FieldReader r(j, pointer);
  RateProfile p;
  if (r.has("family")) {
    try {
      p.family = family_from_string(r.get<std::string>("family"));
    } catch (const Error& e) {
      fail(ErrorKind::Validation, e.what(), r.at("family"));
    }
  }
  p.holder_radius = r.get_or("holder_radius", p.holder_radius);
  p.besov_radius = r.get_or("besov_radius", p.besov_radius);
  p.stationary_c = r.get_or("stationary_c", p.stationary_c);
  p.stationary_d = r.get_or("stationary_d", p.stationary_d);
  p.fbm_small_ball = r.get_or("fbm_small_ball", p.fbm_small_ball);
  p.fbm_rkhs = r.get_or("fbm_rkhs", p.fbm_rkhs);
  p.sup_grid = r.get_or("sup_grid", p.sup_grid);
  p.sup_safety = r.get_or("sup_safety", p.sup_safety);
  r.finish();
  require(p.holder_radius > 0, "holder_radius must be positive", r.at("holder_radius"));
  require(p.besov_radius > 0, "besov_radius must be positive", r.at("besov_radius"));
  require(p.stationary_c > 0 && p.stationary_d > 0, "stationary constants must be positive",
          r.at("stationary_c"));
  require(p.fbm_small_ball > 0 && p.fbm_rkhs >= 0, "fbm constants must be non-negative",
          r.at("fbm_small_ball"));
  require(p.sup_grid >= 2, "sup_grid must be >= 2", r.at("sup_grid"));
  require(p.sup_safety >= 1.0, "sup_safety must be >= 1", r.at("sup_safety"));
  return p;
}

std::vector<double> alpha_exponents(std::span<const double> betas) {
  if (betas.empty()) fail(ErrorKind::Domain, "alpha_exponents: empty beta vector");
  for (double b : betas)
    if (!(b > 0.0)) fail(ErrorKind::Domain, "alpha_exponents: smoothness must be positive");
  std::vector<double> alpha(betas.size(), 1.0);
  for (std::size_t i = betas.size() - 1; i-- > 0;)
    alpha[i] = alpha[i + 1] * std::min(betas[i + 1], 1.0);
  return alpha;
}

namespace {

double exponent(double beta_alpha, int t) { return beta_alpha / (2.0 * beta_alpha + t); }

void require_n(double n, double min_n, const char* op) {
  if (!(n >= min_n))
    fail(ErrorKind::Domain, std::string(op) + ": requires n >= " + std::to_string(int(min_n)));
}

}  // namespace

MinimaxRate minimax_rate(const CompositionStructure& eta, double n) {
  require_n(n, 2.0, "minimax_rate");
  const auto alpha = alpha_exponents(eta.betas);
  // the largest rate has the smallest exponent
  std::vector<double> ex(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i)
    ex[i] = exponent(eta.betas[i] * alpha[i], eta.graph.eff_dims.at(i));
  const double best = *std::min_element(ex.begin(), ex.end());
  MinimaxRate out;
  out.rate = std::pow(n, -best);
  for (std::size_t i = 0; i < ex.size(); ++i)
    if (ex[i] <= best * (1.0 + 1e-12)) out.argmax.push_back(static_cast<int>(i));
  return out;
}

double log_entropy_constant_q1(double beta, int r, double K) {
  if (!(beta > 0.0) || r < 1 || !(K > 0.0))
    fail(ErrorKind::Domain, "entropy constant requires beta > 0, r >= 1, K > 0");
  const double e = std::numbers::e;
  const double rr = r;
  return std::log1p(e * K) + (rr + 1) * std::log(4.0) + (rr + 1) * std::log(beta + 3.0) +
         (rr + 1) * std::log(rr) + (rr / beta) * std::log(8.0 * e * K * K);
}

double entropy_constant_q1(double beta, int r, double K) {
  return std::exp(log_entropy_constant_q1(beta, r, K));
}

int wavelet_resolution(double n, double beta, int r) {
  require_n(n, 2.0, "wavelet_resolution");
  const double j = std::log2(n) / (2.0 * beta + r);
  return std::max(1, static_cast<int>(std::round(j)));  // std::round: ties away from zero
}

double stationary_scaling(double n, double beta, int r) {
  require_n(n, 2.0, "stationary_scaling");
  const double s = 2.0 * beta + r;
  return std::pow(n, 1.0 / s) * std::pow(std::log(n), -(1.0 + r) / s);
}

double rate_floor(const RateProfile& p, double alpha, double beta, int r, double n) {
  const double lq = log_entropy_constant_q1(beta, r, p.holder_radius);
  return std::exp(beta / (2.0 * beta + r) * lq) * std::pow(n, -exponent(beta * alpha, r));
}

double wavelet_base_rate(const RateProfile& p, double beta, int r, double n) {
  const int J = wavelet_resolution(n, beta, r);
  const double tb = std::pow(2.0, beta);
  return p.besov_radius * (tb + 1) * (tb + 1) / (tb - 1) * std::sqrt(r * std::pow(2.0, r)) *
         std::pow(J, 1.5) * std::pow(2.0, -J * beta);
}

double family_c1_prime(const RateProfile& p, double beta, int r) {
  switch (p.family) {
    case Family::LevyFbm: {
      // small-ball constant of the released constant Z, with c = 2/sqrt(2 pi)
      const double c = 2.0 / std::sqrt(2.0 * std::numbers::pi);
      const double cz = beta / (std::pow(c, r / beta) * r) + 0.5;
      return std::max(1.0, p.fbm_small_ball + cz + p.fbm_rkhs);
    }
    case Family::RescaledStationary: {
      // phi_a(delta) <= (C (log(a/delta))^{1+r} + D) a^r; with log(a/delta) <= log n
      // and log n >= log 3 this is below n eps^2 once C_1'^2 >= C + D/(log 3)^{1+r}
      const double l3 = std::log(3.0);
      return std::max(1.0, std::sqrt(p.stationary_c + p.stationary_d / std::pow(l3, 1.0 + r)));
    }
    case Family::TruncatedWavelet: {
      // J <= c_J log n and 2^{-J b} <= 2^{b/2} n^{-b/(2b+r)} for n >= 3
      const double l3 = std::log(3.0);
      const double cj =
          std::max(1.0 / l3, 0.5 / l3 + 1.0 / (std::numbers::ln2 * (2.0 * beta + r)));
      const double tb = std::pow(2.0, beta);
      const double c = p.besov_radius * (tb + 1) * (tb + 1) / (tb - 1) *
                       std::sqrt(r * std::pow(2.0, r)) * std::pow(cj, 1.5) *
                       std::pow(2.0, beta / 2);
      return std::max(1.0, c);
    }
  }
  return 1.0;
}

double family_c2_prime(const RateProfile& p, double beta, int r) {
  switch (p.family) {
    case Family::LevyFbm: return 0.0;
    case Family::RescaledStationary: return (1.0 + r) * beta / (2.0 * beta + r);
    case Family::TruncatedWavelet: return 1.5;
  }
  return 0.0;
}

namespace {

// Lifted constants C_1'^2 (2b+1)^{2 C_2'} and (2b+2) C_2' valid for every alpha.
RateConstants lifted(const RateProfile& p, double beta, int r) {
  const double c1p = family_c1_prime(p, beta, r);
  const double c2p = family_c2_prime(p, beta, r);
  if (p.family == Family::LevyFbm) return {c1p, 0.0};
  return {c1p * c1p * std::pow(2.0 * beta + 1.0, 2.0 * c2p), (2.0 * beta + 2.0) * c2p};
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::Domain, "alpha must lie in (0, 1]");
}

}  // namespace

double family_rate(const RateProfile& p, double alpha, double beta, int r, double n) {
  require_n(n, 3.0, "eps_alpha");
  check_alpha(alpha);
  if (!(beta > 0.0) || r < 1) fail(ErrorKind::Domain, "eps_alpha requires beta > 0, r >= 1");
  if (p.family == Family::TruncatedWavelet && alpha == 1.0)
    return wavelet_base_rate(p, beta, r, n);
  const auto c = lifted(p, beta, r);
  return c.c1 * std::pow(std::log(n), c.c2) * std::pow(n, -exponent(beta * alpha, r));
}

double eps_alpha(const RateProfile& p, double alpha, double beta, int r, double n) {
  return std::max(family_rate(p, alpha, beta, r, n), rate_floor(p, alpha, beta, r, n));
}

RateConstants rate_constants(const RateProfile& p, double beta, int r) {
  auto c = lifted(p, beta, r);
  const double lq = log_entropy_constant_q1(beta, r, p.holder_radius);
  c.c1 = std::max(c.c1, std::exp(beta / (2.0 * beta + r) * lq));
  return c;
}

RateConstants structure_constants(const CompositionStructure& eta, const RateProfile& p) {
  const auto& b = eta.bounds;
  const int m = std::max(2, p.sup_grid);
  RateConstants out{1.0, 0.0};
  std::vector<int> dims(eta.graph.eff_dims.begin(), eta.graph.eff_dims.end() - 1);
  std::sort(dims.begin(), dims.end());
  dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
  for (int t : dims) {
    for (int k = 0; k < m; ++k) {
      const double beta = b.lo == b.hi ? b.lo : b.lo + (b.hi - b.lo) * k / (m - 1);
      const auto c = rate_constants(p, beta, t);
      out.c1 = std::max(out.c1, c.c1);
      out.c2 = std::max(out.c2, c.c2);
    }
  }
  out.c1 *= p.sup_safety;
  return out;
}

double eps_structure(const CompositionStructure& eta, const RateProfile& p, double n) {
  require_n(n, 3.0, "eps_structure");
  const auto c = structure_constants(eta, p);
  const double eps = c.c1 * std::pow(std::log(n), c.c2) * minimax_rate(eta, n).rate;
  const auto alpha = alpha_exponents(eta.betas);
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double layer = eps_alpha(p, alpha[i], eta.betas[i], eta.graph.eff_dims[i], n);
    if (eps < layer * (1.0 - 1e-12))
      fail(ErrorKind::Numeric, "eps_structure below the layer rate of layer " +
                                   std::to_string(i) + "; raise sup_grid or sup_safety");
  }
  return eps;
}

LogWeight psi_log_weight(const CompositionStructure& eta, const RateProfile& p, double n) {
  const double eps = eps_structure(eta, p, n);
  const double size_penalty = std::exp(std::exp(static_cast<double>(eta.graph.node_count())));
  const double psi = n * eps * eps + size_penalty;
  if (!std::isfinite(psi)) return LogWeight::zero();
  return {-psi};
}

double layer_slack(const CompositionStructure& eta, const RateProfile& p, double n, int layer) {
  const auto alpha = alpha_exponents(eta.betas);
  const auto i = static_cast<std::size_t>(layer);
  const double e = eps_alpha(p, alpha.at(i), eta.betas.at(i), eta.graph.eff_dims.at(i), n);
  return 2.0 * std::pow(e, 1.0 / alpha[i]);
}

}  // namespace deepgp
