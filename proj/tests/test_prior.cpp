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

#include <cmath>
#include <limits>
#include <numeric>

#include "prior.hpp"
#include "stats.hpp"

using namespace deepgp;

namespace {

CompositionStructure make(std::vector<int> dims, std::vector<std::vector<IndexSet>> sets, std::vector<double> betas) {
  CompositionStructure eta;
  eta.graph = CompositionGraph::from_sets(std::move(dims), std::move(sets));
  eta.betas = std::move(betas);
  return eta;
}

CompositionStructure chain(int hidden_width, double beta = 1.0) {
  std::vector<IndexSet> first(hidden_width, IndexSet{1});
  return make({1, hidden_width, 1}, {first, {{1}}}, {beta, beta});
}

StructurePriorSpec small_space(double n = 200) {
  StructurePriorSpec spec;
  spec.space.input_dim = 1;
  spec.space.max_q = 1;
  spec.space.max_width = 2;
  spec.space.max_nodes = 8;
  spec.n = n;
  return spec;
}

StructurePriorSpec listed(std::vector<CompositionStructure> list, double n = 200) {
  auto spec = small_space(n);
  spec.structures = std::move(list);
  return spec;
}

}  // namespace

TEST_CASE("gamma sums to one over an uncapped space") {
  for (int input : {1, 2}) {
    auto spec = small_space();
    spec.space.input_dim = input;
    spec.space.max_nodes = 100;
    const auto en = enumerate_structures(spec.space, spec.beta_grid);
    double total = 0.0;
    for (const auto& eta : en.structures) total += std::exp(log_gamma(eta, spec));
    CAPTURE(input);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("weights are normalized and positive") {
  const auto w = structure_prior_weights(small_space());
  REQUIRE(w.entries.size() > 1);
  double total = 0.0;
  for (const auto& e : w.entries) {
    total += e.weight;
    CHECK(e.weight >= 0.0);
    CHECK(std::isfinite(e.log_gamma));
  }
  CHECK(std::abs(total - 1.0) < 1e-12);
}

TEST_CASE("weights follow gamma times the penalty") {
  const auto spec = small_space();
  const auto w = structure_prior_weights(spec);
  // independent log-sum-exp of log gamma - n eps^2 - e^{e^{|d|_1}}
  std::vector<double> lw;
  for (const auto& e : w.entries) {
    const double eps = eps_structure(e.structure, spec.profile, spec.n);
    lw.push_back(log_gamma(e.structure, spec) - spec.n * eps * eps -
                 std::exp(std::exp(double(e.structure.graph.node_count()))));
  }
  const double mx = *std::max_element(lw.begin(), lw.end());
  double z = 0;
  for (double v : lw) z += std::exp(v - mx);
  for (std::size_t i = 0; i < lw.size(); ++i)
    CHECK(w.entries[i].weight == doctest::Approx(std::exp(lw[i] - mx) / z).epsilon(1e-10));
}

TEST_CASE("single-structure space has weight one") {
  const auto w = structure_prior_weights(listed({chain(1)}));
  REQUIRE(w.entries.size() == 1);
  CHECK(w.entries[0].weight == 1.0);
  KeyedRng rng(1);
  for (int i = 0; i < 100; ++i) CHECK(sample_structure(w, rng) == chain(1));
}

TEST_CASE("penalty cancellation between structures of equal size") {
  const auto a = chain(1, 1.0), b = chain(1, 0.5);
  const auto spec = listed({a, b}, 1000);
  const auto w = structure_prior_weights(spec);
  const double ea = eps_structure(a, spec.profile, spec.n), eb = eps_structure(b, spec.profile, spec.n);
  REQUIRE(ea < eb);
  CHECK(w.entries[0].weight > w.entries[1].weight);
  const double lr = w.entries[0].log_weight.log_value - w.entries[1].log_weight.log_value;
  CHECK(lr == doctest::Approx(spec.n * (eb * eb - ea * ea)).epsilon(1e-9));
}

TEST_CASE("overflowing penalty gets weight zero") {
  const auto big = chain(8);  // |d|_1 = 1 + 1 + 8
  REQUIRE(big.graph.node_count() == 10);
  const auto small = chain(1);
  REQUIRE(small.graph.node_count() == 3);
  auto spec = listed({small, big}, 1000);
  spec.space.max_width = 8;
  const auto w = structure_prior_weights(spec);
  CHECK(w.entries[1].weight == 0.0);
  CHECK(w.entries[1].log_weight.log_value == -std::numeric_limits<double>::infinity());
  CHECK(w.entries[0].weight == 1.0);

  KeyedRng rng(2);
  int hits = 0;
  for (int i = 0; i < 100000; ++i) hits += sample_structure_index(w, rng) == 1;
  CHECK(hits == 0);
}

TEST_CASE("all-zero weights are a configuration error") {
  auto spec = listed({chain(8)}, 1000);
  spec.space.max_width = 8;
  try {
    structure_prior_weights(spec);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
  }
}

TEST_CASE("weight decreases strictly in eps at fixed gamma and size") {
  const auto spec = small_space(500);
  std::vector<CompositionStructure> list;
  for (double b : {0.5, 0.6, 0.7, 0.8, 0.9, 1.0}) list.push_back(chain(1, b));
  const auto w = structure_prior_weights(listed(list, 500));
  for (std::size_t i = 0; i < list.size(); ++i)
    for (std::size_t j = 0; j < list.size(); ++j) {
      const double ei = eps_structure(list[i], spec.profile, 500), ej = eps_structure(list[j], spec.profile, 500);
      if (ei < ej) CHECK(w.entries[i].log_weight.log_value > w.entries[j].log_weight.log_value);
    }
}

TEST_CASE("structure sampling frequencies") {
  const auto w = structure_prior_weights(small_space());
  KeyedRng rng(3, {1});
  constexpr int count = 10000;
  std::vector<int> hits(w.entries.size(), 0);
  for (int i = 0; i < count; ++i) ++hits[sample_structure_index(w, rng)];
  for (std::size_t i = 0; i < hits.size(); ++i) {
    const double p = w.entries[i].weight;
    const double sd = std::sqrt(p * (1 - p) / count);
    CHECK(std::abs(hits[i] / double(count) - p) <= 4 * sd + 1e-12);
  }
}

TEST_CASE("single-node draw") {
  const auto eta = make({1, 1}, {{{1}}}, {1.0});
  auto spec = listed({eta});
  const auto d = sample_dgp(eta, spec, KeyedRng(4));
  REQUIRE(d.layers.size() == 1);
  REQUIRE(d.nodes.size() == 1);
  CHECK(d.layers[0].paths[0].is_wavelet());
  CHECK(d.nodes[0].stats.accepted);
  CHECK(in_conditioning_set(d.layers[0].paths[0], d.nodes[0].conditioning).inside);
}

TEST_CASE("figure-two graph draws four conditioned paths") {
  const auto eta = make({5, 3, 1}, {{{1, 3, 4}, {1, 4, 5}, {2}}, {{1, 2, 3}}}, {1.0, 1.0});
  auto spec = small_space();
  spec.space.input_dim = 5;
  spec.space.max_width = 3;
  spec.space.max_nodes = 12;
  const auto d = sample_dgp(eta, spec, KeyedRng(5));
  CHECK(d.nodes.size() == 4);
  CHECK(d.layers[0].paths.size() == 3);
  CHECK(d.layers[1].paths.size() == 1);
  for (const auto& node : d.nodes) {
    CHECK(node.stats.accepted);
    CHECK(in_conditioning_set(d.path(node), node.conditioning).inside);
  }
  CHECK(d.layers[0].paths[0].dim() == 3);
  CHECK(d.layers[0].paths[2].dim() == 1);

  std::vector<double> pts(5 * 1000);
  KeyedRng rng(6);
  for (auto& p : pts) p = 2 * rng.uniform() - 1;
  for (double v : d.eval(pts)) {
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("grid-family nodes use the layer slack") {
  auto spec = small_space(1000);
  spec.profile.family = Family::LevyFbm;
  spec.beta_grid = {0.5, 0.75};
  const auto eta = make({1, 2, 1}, {{{1}, {1}}, {{1, 2}}}, {0.5, 0.75});
  const auto alpha0 = std::min(eta.betas[1], 1.0);
  const double slack0 = 2 * std::pow(eps_alpha(spec.profile, alpha0, 0.5, 1, 1000), 1 / alpha0);
  const double slack1 = 2 * eps_alpha(spec.profile, 1.0, 0.75, 2, 1000);
  CHECK(node_template(eta, spec, 0, 0).conditioning.slack == doctest::Approx(slack0).epsilon(1e-12));
  CHECK(node_template(eta, spec, 1, 0).conditioning.slack == doctest::Approx(slack1).epsilon(1e-12));
  CHECK(node_template(eta, spec, 1, 0).gp.r == 2);
  CHECK(node_template(eta, spec, 0, 1).conditioning.mode == ConditioningMode::EmpiricalHolder);
}

TEST_CASE("draws are deterministic and seeds do not collide") {
  const auto eta = chain(2);
  const auto spec = listed({eta});
  const auto a = sample_dgp(eta, spec, KeyedRng(77));
  const auto b = sample_dgp(eta, spec, KeyedRng(77));
  for (std::size_t i = 0; i < a.nodes.size(); ++i) CHECK(a.nodes[i].latent == b.nodes[i].latent);

  const auto w = structure_prior_weights(spec);
  int distinct = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto x = sample_prior(w, spec, KeyedRng(s * 2654435761ULL));
    const auto y = sample_prior(w, spec, KeyedRng((s * 2654435761ULL) ^ (1ULL << (s % 64))));
    distinct += x.draw.nodes[0].latent != y.draw.nodes[0].latent;
  }
  CHECK(distinct == 100);
}

TEST_CASE("distinct nodes are independent") {
  const auto eta = chain(2);
  const auto spec = listed({eta});
  std::vector<double> a, b;
  for (std::uint64_t s = 0; s < 10000; ++s) {
    const auto d = sample_dgp(eta, spec, KeyedRng(s, {9}));
    a.push_back(d.nodes[0].latent[0]);
    b.push_back(d.nodes[1].latent[0]);
  }
  double cov = 0;
  const double ma = mean(a), mb = mean(b);
  for (std::size_t i = 0; i < a.size(); ++i) cov += (a[i] - ma) * (b[i] - mb);
  cov /= double(a.size() - 1);
  CHECK(std::abs(cov / std::sqrt(variance(a) * variance(b))) < 0.05);
}

TEST_CASE("prior frequencies match the weights") {
  const auto spec = small_space();
  const auto w = structure_prior_weights(spec);
  constexpr int count = 10000;
  std::vector<int> hits(w.entries.size(), 0);
  for (int i = 0; i < count; ++i) {
    KeyedRng rng(i, {10});
    ++hits[sample_prior(w, spec, rng).structure_index];
  }
  for (std::size_t i = 0; i < hits.size(); ++i) {
    const double p = w.entries[i].weight;
    CHECK(std::abs(hits[i] / double(count) - p) <= 4 * std::sqrt(p * (1 - p) / count) + 1e-12);
  }
}

TEST_CASE("prior spec json round trip") {
  auto spec = small_space(321);
  spec.structures = std::vector<CompositionStructure>{chain(1)};
  const auto back = prior_spec_from_json(to_json(spec));
  CHECK(back.n == 321);
  CHECK(back.structures->front() == chain(1));
  CHECK(back.space.max_width == 2);
  CHECK_THROWS_AS(prior_spec_from_json(json{{"n", 1}}), Error);
  CHECK_THROWS_AS(prior_spec_from_json(json{{"bogus", 1}}), Error);
}
