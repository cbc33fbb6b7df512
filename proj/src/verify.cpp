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

// Property checks run by `verify`. Each check draws its own keyed stream, so
// suites can run in any order and still give the same numbers.

#include <algorithm>
#include <cmath>
#include <functional>

#include "experiment.hpp"
#include "format.hpp"
#include "stats.hpp"

namespace deepgp {

namespace {

struct Suite {
  std::string name;
  std::uint64_t seed;
  std::vector<CheckResult> out;

  KeyedRng rng(std::uint64_t tag) const { return KeyedRng(seed, {fnv(name), tag}); }

  static std::uint64_t fnv(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    return h;
  }

  // value <= bound passes; exceptions turn into a failed check
  void run(const std::string& check, const std::function<CheckResult()>& body) {
    CheckResult c;
    try {
      c = body();
    } catch (const std::exception& e) {
      c.passed = false;
      c.value = std::numeric_limits<double>::quiet_NaN();
      c.detail = std::string("error: ") + e.what();
    }
    c.suite = name;
    c.name = check;
    out.push_back(std::move(c));
  }
};

CheckResult at_most(double value, double bound, std::string detail = {}) {
  return {"", "", value <= bound, value, bound, std::move(detail)};
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

int uniform_int(KeyedRng& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.uniform() * (hi - lo + 1));
}

IndexSet random_subset(KeyedRng& rng, int dim, int max_size) {
  const int size = uniform_int(rng, 1, std::min(dim, max_size));
  std::vector<int> all(dim);
  for (int i = 0; i < dim; ++i) all[i] = i + 1;
  for (int i = 0; i < size; ++i) std::swap(all[i], all[i + static_cast<int>(rng.uniform() * (dim - i))]);
  IndexSet s(all.begin(), all.begin() + size);
  std::sort(s.begin(), s.end());
  return s;
}

// Random graph; layers listed in `scalar_layers` read one coordinate per output.
CompositionGraph random_graph(KeyedRng& rng, int q, int max_width, const std::vector<int>& scalar_layers) {
  std::vector<int> dims{uniform_int(rng, 1, max_width)};
  for (int i = 1; i <= q; ++i) dims.push_back(uniform_int(rng, 1, max_width));
  dims.push_back(1);
  std::vector<std::vector<IndexSet>> sets(q + 1);
  for (int i = 0; i <= q; ++i) {
    const bool scalar = std::find(scalar_layers.begin(), scalar_layers.end(), i) != scalar_layers.end();
    for (int j = 0; j < dims[i + 1]; ++j) sets[i].push_back(random_subset(rng, dims[i], scalar ? 1 : dims[i]));
  }
  return CompositionGraph::from_sets(dims, sets);
}

// ------------------------------------------------------------------ rates

void rates_suite(Suite& s) {
  s.run("alpha_recursion", [&] {
    auto rng = s.rng(1);
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
      std::vector<double> b(uniform_int(rng, 1, 6));
      for (auto& v : b) v = 0.1 + 1.9 * rng.uniform();
      const auto a = alpha_exponents(b);
      worst = std::max(worst, std::abs(a.back() - 1.0));
      for (std::size_t i = 0; i + 1 < b.size(); ++i)
        worst = std::max(worst, rel(a[i], a[i + 1] * std::min(b[i + 1], 1.0)));
    }
    return at_most(worst, 1e-15, "500 random beta vectors");
  });

  s.run("redundant_rate_equality", [&] {
    auto rng = s.rng(2);
    double worst = 0.0;
    int tested = 0;
    for (int guard = 0; tested < 200 && guard < 20000; ++guard) {
      const int q = uniform_int(rng, 1, 4);
      const int j = uniform_int(rng, 1, q);
      CompositionStructure eta;
      eta.graph = random_graph(rng, q, 3, {j - 1, j});
      eta.bounds = {0.05, 1.0};
      for (int i = 0; i <= q; ++i) eta.betas.push_back(0.3 + 0.7 * rng.uniform());
      if (!validate_structure(eta).ok) continue;
      const auto red = reduce_redundant(eta);
      if (!red.applicable) continue;
      ++tested;
      for (double n : {1e3, 1e6}) worst = std::max(worst, rel(minimax_rate(red.structure, n).rate, minimax_rate(eta, n).rate));
    }
    CheckResult c = at_most(worst, 1e-12, std::to_string(tested) + " structures at n = 1e3 and 1e6");
    c.passed = c.passed && tested == 200;
    return c;
  });

  s.run("eps_ratio", [&] {
    auto rng = s.rng(3);
    double worst = 0.0;  // max over pairs of the larger relative violation
    int tested = 0;
    for (int guard = 0; tested < 1000 && guard < 100000; ++guard) {
      const auto fam = static_cast<Family>(uniform_int(rng, 0, 2));
      const int q = uniform_int(rng, 0, 3);
      CompositionStructure eta;
      eta.graph = random_graph(rng, q, 3, {});
      if (eta.graph.node_count() > 12) continue;
      const double lo = 0.2 + 0.4 * rng.uniform();
      const double hi = std::min(fam == Family::LevyFbm ? 0.95 : 1.5, lo + 0.1 + 0.9 * rng.uniform());
      eta.bounds = {lo, hi};
      const double n = std::pow(10.0, 3.0 + 3.0 * rng.uniform());
      auto eta_p = eta;
      for (int i = 0; i <= q; ++i) {
        const double bp = lo + (hi - lo) * rng.uniform();
        eta_p.betas.push_back(bp);
        eta.betas.push_back(std::min(hi, bp + rng.uniform() / std::pow(std::log(n), 2)));
      }
      if (!validate_structure(eta).ok) continue;
      RateProfile p;
      p.family = fam;
      const double e = eps_structure(eta, p, n), ep = eps_structure(eta_p, p, n);
      worst = std::max({worst, e / ep - 1.0, ep / (std::exp(hi) * e) - 1.0});
      ++tested;
    }
    CheckResult c = at_most(worst, 1e-12, std::to_string(tested) + " (lambda, beta, beta') pairs");
    c.passed = c.passed && tested == 1000;
    return c;
  });

  s.run("rate_floor", [&] {
    auto rng = s.rng(4);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
      RateProfile p;
      p.family = static_cast<Family>(uniform_int(rng, 0, 2));
      const double beta = p.family == Family::LevyFbm ? 0.05 + 0.9 * rng.uniform() : 0.1 + 1.9 * rng.uniform();
      const double alpha = 0.05 + 0.95 * rng.uniform();
      const int r = uniform_int(rng, 1, 3);
      const double n = std::pow(10.0, 0.5 + 7.0 * rng.uniform());
      worst = std::max(worst, rate_floor(p, alpha, beta, r, n) / eps_alpha(p, alpha, beta, r, n));
    }
    return at_most(worst, 1.0, "max floor / eps_alpha over 1000 draws");
  });

  s.run("minimax_monotone_in_beta", [&] {
    auto rng = s.rng(5);
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
      CompositionStructure eta;
      const int q = uniform_int(rng, 0, 3);
      eta.graph = random_graph(rng, q, 3, {});
      eta.bounds = {0.1, 2.0};
      auto lower = eta;
      for (int i = 0; i <= q; ++i) {
        const double b = 0.1 + 1.9 * rng.uniform();
        lower.betas.push_back(b);
        eta.betas.push_back(std::min(2.0, b + rng.uniform()));
      }
      const double n = std::pow(10.0, 2.0 + 5.0 * rng.uniform());
      worst = std::max(worst, minimax_rate(eta, n).rate / minimax_rate(lower, n).rate);
    }
    return at_most(worst, 1.0, "r_n(beta) / r_n(beta') with beta' <= beta");
  });

  s.run("entropy_constant_q1", [&] {
    const double q1 = entropy_constant_q1(1.0, 1, 1.0);
    return at_most(rel(q1, 2.07e4), 0.01, "Q1(1,1,1) = " + format_short(q1));
  });
}

// ------------------------------------------------------------------ funcspace

GridValues random_smooth(KeyedRng& rng, int m, double amp) {
  const double a = amp * (2.0 * rng.uniform() - 1.0), b = 0.5 + 3.0 * rng.uniform(), c = 6.0 * rng.uniform();
  return GridValues::from_function(1, m, [=](std::span<const double> u) { return a * std::sin(b * u[0] + c); });
}

LayerFunction scalar_layer(GridValues g) {
  return LayerFunction{1, {PathFunction(std::move(g))}, {{1}}};
}

void funcspace_suite(Suite& s) {
  s.run("composition_gap_bound", [&] {
    auto rng = s.rng(1);
    constexpr int m = 257;
    double worst = -1.0;
    std::vector<double> probe(2001);
    for (std::size_t i = 0; i < probe.size(); ++i) probe[i] = -1.0 + 2.0 * i / (probe.size() - 1);
    for (int t = 0; t < 1000; ++t) {
      const double beta1 = 0.2 + 0.8 * rng.uniform();
      const double c = 2.0 * rng.uniform() - 1.0, a = 0.5 * rng.uniform();
      auto h1 = GridValues::from_function(1, m, [=](std::span<const double> u) {
        return a * std::pow(std::abs(u[0] - c), beta1) - 0.5;
      });
      auto h0 = random_smooth(rng, m, 1.0);
      auto h0t = h0, h1t = h1;
      const auto p0 = random_smooth(rng, m, 0.2 * rng.uniform());
      const auto p1 = random_smooth(rng, m, 0.2 * rng.uniform());
      for (int k = 0; k < m; ++k) {
        h0t.values[k] = std::clamp(h0t.values[k] + p0.values[k], -1.0, 1.0);
        h1t.values[k] += p1.values[k];
      }
      const std::vector<LayerFunction> h{scalar_layer(h0), scalar_layer(h1)};
      const std::vector<LayerFunction> ht{scalar_layer(h0t), scalar_layer(h1t)};
      const std::vector<double> betas{1.0, beta1}, etas{0.0, 0.0};
      const auto bound = composition_gap_bound(h, ht, betas, 1.0, etas, m);
      // multilinear interpolation of a beta-Hoelder function can lose up to
      // two cells' worth of its modulus
      const double tol = 2.0 * std::pow(2.0 / (m - 1), beta1);
      worst = std::max(worst, measured_gap(h, ht, probe) - bound.bound - tol);
    }
    return at_most(worst, 0.0, "max(measured - bound - tolerance) over 1000 two-layer pairs");
  });

  s.run("compose_associative", [&] {
    auto rng = s.rng(2);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const auto l0 = scalar_layer(random_smooth(rng, 33, 1.0));
      const auto l1 = scalar_layer(random_smooth(rng, 33, 1.0));
      const auto l2 = scalar_layer(random_smooth(rng, 33, 1.0));
      std::vector<double> x(64);
      for (auto& v : x) v = 2.0 * rng.uniform() - 1.0;
      const std::vector<LayerFunction> all{l0, l1, l2}, first{l0}, rest{l1, l2}, front{l0, l1}, last{l2};
      const auto a = compose(rest, compose(first, x));
      const auto b = compose(last, compose(front, x));
      const auto c = compose(all, x);
      for (std::size_t i = 0; i < x.size(); ++i) worst = std::max({worst, std::abs(a[i] - c[i]), std::abs(b[i] - c[i])});
    }
    return at_most(worst, 0.0, "pointwise difference of the three bracketings");
  });

  s.run("holder_nested", [&] {
    auto rng = s.rng(3);
    const double betas[] = {0.3, 0.6, 0.9, 1.3, 1.7};
    double worst = 0.0;
    for (int t = 0; t < 50; ++t) {
      double c[4];
      for (auto& v : c) v = (2.0 * rng.uniform() - 1.0) / 4.0;
      const PathFunction f(GridValues::from_function(1, 129, [&](std::span<const double> u) {
        return c[0] + u[0] * (c[1] + u[0] * (c[2] + u[0] * c[3]));
      }));
      for (int i = 0; i < 5; ++i)
        for (int j = i + 1; j < 5; ++j)
          worst = std::max(worst, holder_norm_empirical(f, betas[i], 0).value /
                                      holder_norm_empirical(f, betas[j], 0).value);
    }
    return at_most(worst, 1.05, "max norm(beta') / norm(beta), beta' < beta, random cubics");
  });

  s.run("covering_sandwich", [&] {
    double worst = 0.0;
    std::string detail;
    for (double delta : {1.0, 0.5}) {
      const auto c = covering_number_oracle(1.0, 1.0, delta);
      if (c.lower > c.upper) return CheckResult{"", "", false, double(c.lower), double(c.upper), "packing exceeds cover"};
      worst = std::max(worst, std::log(double(c.upper)) / c.log_bound);
      detail += "delta=" + format_short(delta) + " N<=" + std::to_string(c.upper) + " ";
    }
    return at_most(worst, 1.0, detail + "(log N / bound)");
  });
}

// ------------------------------------------------------------------ gp

void gp_suite(Suite& s) {
  s.run("besov_acceptance_bound", [&] {
    GpSpec spec{Family::TruncatedWavelet, 1.0, 1, 1e6, 0};
    const auto fam = GaussianFamily::get(spec);
    ConditioningSpec cond;
    cond.K = besov_conditioning_radius(2.0);
    cond.sup_bound = std::numeric_limits<double>::infinity();
    constexpr int count = 4000;
    const double freq = acceptance_frequency(*fam, cond, count, s.rng(1));
    const double p = acceptance_lower_bound(2.0, 1);
    const double floor = p - 3.0 * std::sqrt(p * (1 - p) / count);
    return CheckResult{"", "", freq >= floor, freq, floor, "frequency vs bound - 3 sigma"};
  });

  s.run("besov_scale_cancellation", [&] {
    GpSpec spec{Family::TruncatedWavelet, 0.8, 1, 1e4, 0};
    const auto fam = GaussianFamily::get(spec);
    auto rng = s.rng(2);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const auto xi = fam->draw_latent(rng);
      const auto path = fam->map(xi);
      double expect = 0.0;
      std::size_t k = 0;
      for (int j = 1; j <= fam->levels(); ++j)
        for (std::size_t c = 0; c < (std::size_t{1} << j); ++c, ++k)
          expect = std::max(expect, std::abs(xi[k]) / std::sqrt(double(j)));
      worst = std::max(worst, rel(besov_norm(path.wavelet(), spec.beta), expect));
    }
    return at_most(worst, 1e-12, "relative error against max |Z| / sqrt(j r)");
  });

  s.run("fbm_increment_variance", [&] {
    GpSpec spec{Family::LevyFbm, 0.5, 1, 1e3, 65};
    const auto fam = GaussianFamily::get(spec);
    auto rng = s.rng(3);
    constexpr int count = 4000;
    const std::vector<std::pair<double, double>> pairs{{-0.5, 0.5}, {0.0, 0.25}, {-1.0, 1.0}};
    double worst = 0.0;
    std::vector<double> acc(pairs.size(), 0.0);
    for (int t = 0; t < count; ++t) {
      // raw node values: eval clips to [-1,1], which would bias the moments
      const auto g = fam->sample(rng).grid();
      auto at = [&](double x) { return g.values[static_cast<std::size_t>(std::lround((x + 1) * (g.m - 1) / 2))]; };
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        const double d = at(pairs[p].first) - at(pairs[p].second);
        acc[p] += d * d;
      }
    }
    for (std::size_t p = 0; p < pairs.size(); ++p)
      worst = std::max(worst, rel(acc[p] / count, std::pow(std::abs(pairs[p].first - pairs[p].second), 2 * spec.beta)));
    // 4 standard errors of a chi-square mean
    return at_most(worst, 4.0 * std::sqrt(2.0 / count), "relative error of E(X(u)-X(v))^2");
  });

  s.run("stationary_scaling", [&] {
    const double a = stationary_scaling(1e6, 1.0, 1);
    return at_most(rel(a, 100.0 * std::pow(std::log(1e6), -2.0 / 3.0)), 1e-12, "a = " + format_short(a));
  });

  s.run("sampler_determinism", [&] {
    double diff = 0.0;
    for (auto fam : {Family::TruncatedWavelet, Family::LevyFbm, Family::RescaledStationary}) {
      GpSpec spec{fam, 0.6, 1, 1e3, 0};
      auto r1 = s.rng(4), r2 = s.rng(4);
      const auto a = GaussianFamily::get(spec)->sample(r1).as_grid();
      const auto b = GaussianFamily::get(spec)->sample(r2).as_grid();
      if (!(a == b)) diff += 1.0;
    }
    return at_most(diff, 0.0, "families whose repeated draws differ");
  });

  s.run("infeasible_conditioning_errors", [&] {
    ConditioningSpec cond;
    cond.sup_bound = 0.0;
    cond.K = 1e9;
    try {
      sample_conditioned(GpSpec{}, cond, 20, s.rng(5));
    } catch (const Error& e) {
      return CheckResult{"", "", e.kind() == ErrorKind::Resource, 0.0, 0.0, e.what()};
    }
    return CheckResult{"", "", false, 1.0, 0.0, "an impossible set accepted a draw"};
  });
}

// ------------------------------------------------------------------ prior

StructurePriorSpec small_prior() {
  StructurePriorSpec spec;
  spec.space.input_dim = 1;
  spec.space.max_q = 1;
  spec.space.max_width = 2;
  spec.space.max_nodes = 5;
  spec.n = 200;
  return spec;
}

void prior_suite(Suite& s) {
  s.run("weights_normalized", [&] {
    const auto w = structure_prior_weights(small_prior());
    double sum = 0.0;
    for (const auto& e : w.entries) sum += e.weight;
    return at_most(std::abs(sum - 1.0), 1e-12, std::to_string(w.entries.size()) + " structures");
  });

  s.run("structure_sampling_frequency", [&] {
    const auto w = structure_prior_weights(small_prior());
    auto rng = s.rng(1);
    constexpr int count = 20000;
    std::vector<int> hits(w.entries.size(), 0);
    for (int t = 0; t < count; ++t) ++hits[sample_structure_index(w, rng)];
    double worst = 0.0;
    for (std::size_t i = 0; i < hits.size(); ++i) {
      const double p = w.entries[i].weight;
      const double sd = std::sqrt(std::max(p * (1 - p), 1e-12) / count);
      worst = std::max(worst, std::abs(hits[i] / double(count) - p) / sd);
    }
    return at_most(worst, 4.5, "max standardized deviation");
  });

  s.run("penalty_dominates_node_term", [&] {
    const auto spec = small_prior();
    const auto w = structure_prior_weights(spec);
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& e : w.entries)
      worst = std::max(worst, e.log_penalty.log_value + std::exp(std::exp(e.structure.graph.node_count())));
    return at_most(worst, 0.0, "max of log penalty + e^{e^{|d|_1}}");
  });

  s.run("dgp_draw_determinism", [&] {
    const auto spec = small_prior();
    const auto w = structure_prior_weights(spec);
    const auto a = sample_prior(w, spec, s.rng(2));
    const auto b = sample_prior(w, spec, s.rng(2));
    std::vector<double> x(101);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = -1.0 + 0.02 * i;
    const auto fa = a.draw.eval(x), fb = b.draw.eval(x);
    double diff = a.structure_index == b.structure_index ? 0.0 : 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) diff = std::max(diff, std::abs(fa[i] - fb[i]));
    return at_most(diff, 0.0, "same key, same draw");
  });

  s.run("dgp_draw_in_range", [&] {
    const auto spec = small_prior();
    const auto w = structure_prior_weights(spec);
    std::vector<double> x(201);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = -1.0 + 0.01 * i;
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      const auto d = sample_prior(w, spec, s.rng(100 + t));
      for (double v : d.draw.eval(x)) worst = std::max(worst, std::abs(v));
    }
    return at_most(worst, 1.0, "max |f| over 20 prior draws");
  });
}

// ------------------------------------------------------------------ inference

void inference_suite(Suite& s) {
  s.run("constant_offset_identities", [&] {
    double worst = 0.0;
    for (double c : {1e-3, 0.1, 0.5, 1.0, 2.0}) {
      const std::vector<double> f(16, 0.3), g(16, 0.3 + c), w(16, 1.0 / 16);
      const auto ig = kl_v2_hellinger(f, g, w);
      worst = std::max({worst, rel(ig.kl, c * c), rel(ig.hellinger, -std::expm1(-c * c / 8))});
    }
    return at_most(worst, 1e-12, "KL = c^2 and d_H = 1 - exp(-c^2/8)");
  });

  s.run("hellinger_sandwich", [&] {
    auto rng = s.rng(1);
    double worst = 0.0;
    constexpr double Q = 1.0;
    for (int t = 0; t < 100; ++t) {
      const std::size_t m = 64;
      std::vector<double> f(m), g(m), w(m, 1.0 / m);
      for (std::size_t i = 0; i < m; ++i) {
        f[i] = Q * (2 * rng.uniform() - 1);
        g[i] = Q * (2 * rng.uniform() - 1);
      }
      const auto ig = kl_v2_hellinger(f, g, w);
      worst = std::max({worst, ig.hellinger / (ig.kl / 8) - 1.0,
                        (std::exp(-Q * Q / 2) / 8) * ig.kl / ig.hellinger - 1.0});
    }
    return at_most(worst, 1e-12, "relative violation of either side, 100 pairs");
  });

  s.run("v2_dominates_kl", [&] {
    auto rng = s.rng(2);
    double worst = -1.0;
    for (int t = 0; t < 100; ++t) {
      std::vector<double> f(32), g(32), w(32, 1.0 / 32);
      for (std::size_t i = 0; i < 32; ++i) {
        f[i] = 2 * rng.uniform() - 1;
        g[i] = 2 * rng.uniform() - 1;
      }
      const auto ig = kl_v2_hellinger(f, g, w);
      worst = std::max(worst, ig.kl - ig.v2_upper);
    }
    return at_most(worst, 0.0, "KL - V2 upper bound");
  });

  s.run("llr_antisymmetric_additive", [&] {
    auto rng = s.rng(3);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      std::vector<double> f(50), g(50), h(50), y(50);
      for (std::size_t i = 0; i < 50; ++i) {
        f[i] = 2 * rng.uniform() - 1;
        g[i] = 2 * rng.uniform() - 1;
        h[i] = 2 * rng.uniform() - 1;
        y[i] = rng.normal();
      }
      const double fg = log_likelihood_ratio(f, g, y), gf = log_likelihood_ratio(g, f, y);
      const double gh = log_likelihood_ratio(g, h, y), fh = log_likelihood_ratio(f, h, y);
      worst = std::max({worst, std::abs(fg + gf), std::abs(fg + gh - fh)});
    }
    return at_most(worst, 1e-10, "absolute error");
  });

  s.run("data_determinism", [&] {
    const Evaluator f = [](std::span<const double> x) {
      std::vector<double> y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) y[i] = 0.5 * std::sin(2 * x[i]);
      return y;
    };
    const auto a = generate_data(f, 1, 100, Design{}, s.rng(4));
    const auto b = generate_data(f, 1, 100, Design{}, s.rng(4));
    return at_most(a.X == b.X && a.Y == b.Y ? 0.0 : 1.0, 0.0, "two draws with one key");
  });
}

}  // namespace

std::vector<CheckResult> run_verify_suite(const std::string& suite, std::uint64_t seed) {
  static const std::vector<std::pair<std::string, void (*)(Suite&)>> suites{
      {"rates", rates_suite}, {"funcspace", funcspace_suite}, {"gp", gp_suite},
      {"prior", prior_suite}, {"inference", inference_suite}};
  std::vector<CheckResult> out;
  bool found = false;
  for (const auto& [name, fn] : suites) {
    if (suite != "all" && suite != name) continue;
    found = true;
    Suite s{name, seed, {}};
    fn(s);
    out.insert(out.end(), s.out.begin(), s.out.end());
  }
  if (!found)
    fail(ErrorKind::Validation, "unknown suite '" + suite + "' (rates, funcspace, gp, prior, inference, all)",
         "/suite");
  return out;
}

}  // namespace deepgp
