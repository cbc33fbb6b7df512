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

#include "gp.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace deepgp {

int default_grid(int r) { return r == 1 ? 65 : 17; }

void validate_gp_spec(const GpSpec& s) {
  if (s.r < 1) fail(ErrorKind::Domain, "GP input dimension must be >= 1");
  if (!(s.beta > 0.0)) fail(ErrorKind::Domain, "GP smoothness must be positive");
  if (!(s.n >= 2.0)) fail(ErrorKind::Domain, "GP sample size n must be >= 2");
  if (s.family == Family::TruncatedWavelet) return;
  if (s.r > 2) fail(ErrorKind::Domain, "grid GP families support r in {1, 2}");
  if (s.family == Family::LevyFbm && !(s.beta < 1.0))
    fail(ErrorKind::Domain, "fractional Brownian motion needs beta in (0, 1)");
  const int m = s.grid > 0 ? s.grid : default_grid(s.r);
  const int cap = s.r == 1 ? 1024 : 64;
  if (m < 16 || m > cap)
    fail(ErrorKind::Domain, "grid must have between 16 and " + std::to_string(cap) + " points per axis");
}

namespace {

std::vector<std::vector<double>> grid_coords(int r, int m) {
  std::size_t total = 1;
  for (int a = 0; a < r; ++a) total *= m;
  std::vector<std::vector<double>> out(total, std::vector<double>(r));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (int a = r - 1; a >= 0; --a) {
      out[idx][a] = -1.0 + 2.0 * static_cast<double>(rest % m) / (m - 1);
      rest /= m;
    }
  }
  return out;
}

double norm2(std::span<const double> u) {
  double s = 0.0;
  for (double v : u) s += v * v;
  return std::sqrt(s);
}

double dist2(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t a = 0; a < u.size(); ++a) s += (u[a] - v[a]) * (u[a] - v[a]);
  return std::sqrt(s);
}

double fbm_cov(std::span<const double> u, std::span<const double> v, double beta) {
  const double h = 2.0 * beta;
  return 0.5 * (std::pow(norm2(u), h) + std::pow(norm2(v), h) - std::pow(dist2(u, v), h));
}

}  // namespace

GaussianFamily::GaussianFamily(const GpSpec& spec) : spec_(spec) {
  validate_gp_spec(spec_);
  const int r = spec_.r;
  if (spec_.family == Family::TruncatedWavelet) {
    J_ = wavelet_resolution(spec_.n, spec_.beta, r);
    for (int j = 1; j <= J_; ++j) {
      const std::size_t count = std::size_t{1} << (j * r);
      level_scale_.push_back(std::pow(2.0, -j * (spec_.beta + 0.5 * r)) / std::sqrt(double(j) * r));
      latent_dim_ += count;
    }
    return;
  }

  m_ = spec_.grid > 0 ? spec_.grid : default_grid(r);
  spec_.grid = m_;
  const auto coords = grid_coords(r, m_);
  total_nodes_ = coords.size();
  const bool fbm = spec_.family == Family::LevyFbm;
  if (!fbm) scaling_ = stationary_scaling(spec_.n, spec_.beta, r);
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (!fbm || norm2(coords[i]) > 0.0) nodes_.push_back(i);  // X(0) = 0 is not random

  const auto N = static_cast<Eigen::Index>(nodes_.size());
  Eigen::MatrixXd cov(N, N);
  for (Eigen::Index a = 0; a < N; ++a)
    for (Eigen::Index b = 0; b <= a; ++b) {
      const auto& u = coords[nodes_[a]];
      const auto& v = coords[nodes_[b]];
      const double c = fbm ? fbm_cov(u, v, spec_.beta)
                           : std::exp(-scaling_ * scaling_ * std::pow(dist2(u, v), 2));
      cov(a, b) = cov(b, a) = c;
    }

  for (double jitter : {0.0, 1e-12, 1e-10, 1e-8}) {
    Eigen::MatrixXd k = cov;
    k.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() == Eigen::Success) {
      chol_ = llt.matrixL();
      jitter_ = jitter;
      latent_dim_ = nodes_.size() + (fbm ? 1 : 0);
      return;
    }
  }
  fail(ErrorKind::Numeric, "covariance Cholesky failed for " + to_string(spec_.family) +
                               " (beta=" + std::to_string(spec_.beta) + ", r=" + std::to_string(r) +
                               ", grid=" + std::to_string(m_) + ") after jitter up to 1e-8");
}

std::shared_ptr<const GaussianFamily> GaussianFamily::get(const GpSpec& spec) {
  using Key = std::tuple<int, double, int, double, int>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const GaussianFamily>> cache;
  validate_gp_spec(spec);
  // n enters only through J (wavelet) or the scaling a (stationary)
  const double n_key = spec.family == Family::LevyFbm ? 0.0 : spec.n;
  const int grid = spec.family == Family::TruncatedWavelet
                       ? 0
                       : (spec.grid > 0 ? spec.grid : default_grid(spec.r));
  const Key key{static_cast<int>(spec.family), spec.beta, spec.r, n_key, grid};
  std::lock_guard lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto fam = std::make_shared<const GaussianFamily>(spec);
  cache.emplace(key, fam);
  return fam;
}

std::vector<double> GaussianFamily::draw_latent(KeyedRng& rng) const {
  std::vector<double> xi(latent_dim_);
  std::normal_distribution<double> nd;
  for (auto& v : xi) v = nd(rng);
  return xi;
}

PathFunction GaussianFamily::map(std::span<const double> xi, bool release) const {
  if (xi.size() != latent_dim_) fail(ErrorKind::Domain, "latent vector has the wrong length");
  if (spec_.family == Family::TruncatedWavelet) {
    auto w = WaveletCoeffs::zeros(spec_.r, J_);
    std::size_t pos = 0;
    for (int j = 1; j <= J_; ++j)
      for (auto& c : w.levels[j - 1]) c = level_scale_[j - 1] * xi[pos++];
    return PathFunction(std::move(w));
  }
  const bool fbm = spec_.family == Family::LevyFbm;
  const std::size_t off = fbm ? 1 : 0;
  Eigen::Map<const Eigen::VectorXd> z(xi.data() + off, static_cast<Eigen::Index>(nodes_.size()));
  const Eigen::VectorXd vals = chol_.triangularView<Eigen::Lower>() * z;
  GridValues g{spec_.r, m_, std::vector<double>(total_nodes_, 0.0)};
  for (std::size_t i = 0; i < nodes_.size(); ++i) g.values[nodes_[i]] = vals[static_cast<Eigen::Index>(i)];
  if (fbm && release)
    for (auto& v : g.values) v += xi[0];
  return PathFunction(std::move(g));
}

PathFunction GaussianFamily::sample(KeyedRng& rng) const { return map(draw_latent(rng)); }

double GaussianFamily::covariance(std::span<const double> u, std::span<const double> v) const {
  switch (spec_.family) {
    case Family::LevyFbm: return 1.0 + fbm_cov(u, v, spec_.beta);
    case Family::RescaledStationary: return std::exp(-scaling_ * scaling_ * std::pow(dist2(u, v), 2));
    case Family::TruncatedWavelet: break;
  }
  fail(ErrorKind::Domain, "closed-form covariance is only provided for grid families");
}

PathFunction sample_wavelet(const GpSpec& spec, KeyedRng& rng) {
  if (spec.family != Family::TruncatedWavelet) fail(ErrorKind::Domain, "sample_wavelet needs the wavelet family");
  return GaussianFamily::get(spec)->sample(rng);
}

PathFunction sample_fbm(const GpSpec& spec, KeyedRng& rng) {
  if (spec.family != Family::LevyFbm) fail(ErrorKind::Domain, "sample_fbm needs the fbm family");
  return GaussianFamily::get(spec)->sample(rng);
}

PathFunction sample_stationary(const GpSpec& spec, KeyedRng& rng) {
  if (spec.family != Family::RescaledStationary)
    fail(ErrorKind::Domain, "sample_stationary needs the stationary family");
  return GaussianFamily::get(spec)->sample(rng);
}

ConditionedSample sample_conditioned(const GaussianFamily& family, const ConditioningSpec& cond,
                                     int max_attempts, const KeyedRng& rng) {
  if (max_attempts < 1) fail(ErrorKind::Domain, "max_attempts must be >= 1");
  ConditioningCheck last;
  for (int a = 1; a <= max_attempts; ++a) {
    auto stream = rng.child(static_cast<std::uint64_t>(a));
    auto xi = family.draw_latent(stream);
    auto path = family.map(xi);
    last = in_conditioning_set(path, cond);
    if (last.inside) {
      ConditionedSampleStats st{a, true, 1.0 / a};
      return {std::move(path), std::move(xi), st, last};
    }
  }
  fail(ErrorKind::Resource, "conditioning too tight: 0 of " + std::to_string(max_attempts) +
                                " draws accepted (empirical rate 0); last rejection: " + last.message);
}

ConditionedSample sample_conditioned(const GpSpec& spec, const ConditioningSpec& cond,
                                     int max_attempts, const KeyedRng& rng) {
  return sample_conditioned(*GaussianFamily::get(spec), cond, max_attempts, rng);
}

double acceptance_frequency(const GaussianFamily& family, const ConditioningSpec& cond, int count,
                            const KeyedRng& rng) {
  if (count < 1) fail(ErrorKind::Domain, "count must be >= 1");
  int hits = 0;
  for (int i = 0; i < count; ++i) {
    auto stream = rng.child(static_cast<std::uint64_t>(i));
    if (in_conditioning_set(family.sample(stream), cond).inside) ++hits;
  }
  return static_cast<double>(hits) / count;
}

double acceptance_lower_bound(double k_prime, int r) {
  if (!(k_prime > std::sqrt(3.0)))
    fail(ErrorKind::Domain, "acceptance bound holds only for K' > sqrt(3)");
  if (r < 1) fail(ErrorKind::Domain, "acceptance bound needs r >= 1");
  return 1.0 - 4.0 / (std::pow(2.0, r * k_prime * k_prime) - 4.0);
}

double besov_conditioning_radius(double k_prime) {
  return (1.0 + k_prime) * std::sqrt(2.0 * std::numbers::ln2);
}

ConditioningSpec layer_conditioning(const RateProfile& profile, double beta, int r, double slack) {
  ConditioningSpec c;
  c.beta = beta;
  c.r = r;
  c.slack = slack;
  if (profile.family == Family::TruncatedWavelet) {
    c.mode = ConditioningMode::BesovCoeffBall;
    c.K = besov_conditioning_radius(profile.besov_radius);
  } else {
    c.mode = ConditioningMode::EmpiricalHolder;
    c.K = profile.holder_radius;
  }
  return c;
}

}  // namespace deepgp
