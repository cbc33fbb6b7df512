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

#include "prior.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace deepgp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_binom(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// log(#subsets of {1..d} with 1..t elements)
double log_subsets_upto(int d, int t) {
  if (t <= 0) return kNegInf;
  double acc = 0.0;
  for (int s = 1; s <= t; ++s) acc += std::exp(log_binom(d, s));
  return std::log(acc);
}

// log(a^D - b^D) for a > b >= 0, given log a and log b
double log_pow_diff(double la, double lb, int D) {
  if (lb == kNegInf) return D * la;
  return D * la + std::log1p(-std::exp(D * (lb - la)));
}

}  // namespace

json to_json(const StructurePriorSpec& s) {
  json j{{"space",
          {{"input_dim", s.space.input_dim},
           {"max_q", s.space.max_q},
           {"max_width", s.space.max_width},
           {"max_nodes", s.space.max_nodes},
           {"max_count", s.space.max_count}}},
         {"beta_bounds", {s.space.bounds.lo, s.space.bounds.hi}},
         {"beta_grid", s.beta_grid},
         {"gamma", {{"q_ratio", s.gamma.q_ratio}, {"width_ratio", s.gamma.width_ratio}}},
         {"profile", to_json(s.profile)},
         {"n", s.n},
         {"max_attempts", s.max_attempts},
         {"grid", s.grid}};
  if (s.structures) {
    json arr = json::array();
    for (const auto& eta : *s.structures) arr.push_back(to_json(eta));
    j["structures"] = arr;
  }
  return j;
}

StructurePriorSpec prior_spec_from_json(const json& j, const std::string& pointer) {
  FieldReader r(j, pointer);
  StructurePriorSpec s;
  if (r.has("space")) {
    FieldReader sp(r.raw("space"), r.at("space"));
    s.space.input_dim = sp.get_or("input_dim", s.space.input_dim);
    s.space.max_q = sp.get_or("max_q", s.space.max_q);
    s.space.max_width = sp.get_or("max_width", s.space.max_width);
    s.space.max_nodes = sp.get_or("max_nodes", s.space.max_nodes);
    s.space.max_count = sp.get_or("max_count", s.space.max_count);
    sp.finish();
    require(s.space.input_dim >= 1, "input_dim must be >= 1", sp.at("input_dim"));
    require(s.space.max_q >= 0, "max_q must be >= 0", sp.at("max_q"));
    require(s.space.max_width >= 1, "max_width must be >= 1", sp.at("max_width"));
    require(s.space.max_nodes >= 1, "max_nodes must be >= 1", sp.at("max_nodes"));
  }
  if (r.has("beta_bounds")) {
    auto b = r.get<std::vector<double>>("beta_bounds");
    require(b.size() == 2 && b[0] > 0 && b[0] <= b[1], "beta_bounds must be [lo, hi] with 0 < lo <= hi",
            r.at("beta_bounds"));
    s.space.bounds = {b[0], b[1]};
  }
  s.beta_grid = r.get_or("beta_grid", s.beta_grid);
  require(!s.beta_grid.empty(), "beta_grid must not be empty", r.at("beta_grid"));
  for (double b : s.beta_grid)
    require(b >= s.space.bounds.lo && b <= s.space.bounds.hi, "beta_grid value outside beta_bounds",
            r.at("beta_grid"));
  if (r.has("gamma")) {
    FieldReader g(r.raw("gamma"), r.at("gamma"));
    s.gamma.q_ratio = g.get_or("q_ratio", s.gamma.q_ratio);
    s.gamma.width_ratio = g.get_or("width_ratio", s.gamma.width_ratio);
    g.finish();
    require(s.gamma.q_ratio > 0 && s.gamma.q_ratio < 1, "q_ratio must lie in (0, 1)", g.at("q_ratio"));
    require(s.gamma.width_ratio > 0 && s.gamma.width_ratio < 1, "width_ratio must lie in (0, 1)",
            g.at("width_ratio"));
  }
  if (r.has("profile")) s.profile = profile_from_json(r.raw("profile"), r.at("profile"));
  s.n = r.get_or("n", s.n);
  require(s.n >= 3, "n must be >= 3", r.at("n"));
  if (r.has("structures")) {
    const auto& arr = r.raw("structures");
    require(arr.is_array() && !arr.empty(), "structures must be a nonempty array", r.at("structures"));
    std::vector<CompositionStructure> list;
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const auto ptr = r.at("structures") + "/" + std::to_string(i);
      auto eta = structure_from_json(arr[i], ptr);
      if (!arr[i].contains("beta_bounds")) eta.bounds = s.space.bounds;
      auto rep = validate_structure(eta);
      if (!rep.ok) fail(ErrorKind::Validation, "invalid structure: " + rep.violations.front(), ptr);
      list.push_back(std::move(eta));
    }
    s.structures = std::move(list);
  }
  s.max_attempts = r.get_or("max_attempts", s.max_attempts);
  require(s.max_attempts >= 1, "max_attempts must be >= 1", r.at("max_attempts"));
  s.grid = r.get_or("grid", s.grid);
  require(s.grid >= 0, "grid must be >= 0", r.at("grid"));
  r.finish();
  return s;
}

double log_gamma(const CompositionStructure& eta, const StructurePriorSpec& spec) {
  const auto& g = eta.graph;
  // geometric laws truncated to the space: q in 0..max_q, d_i in 1..max_width
  auto log_geometric = [](double ratio, int k, int lo, int hi) {
    double z = 0.0;
    for (int j = lo; j <= hi; ++j) z += std::pow(ratio, j - lo);
    return (k - lo) * std::log(ratio) - std::log(z);
  };
  const int max_q = std::max(spec.space.max_q, g.q);
  const int max_w = std::max(spec.space.max_width, *std::max_element(g.dims.begin(), g.dims.end()));
  double lg = log_geometric(spec.gamma.q_ratio, g.q, 0, max_q);
  for (int i = 1; i <= g.q; ++i) lg += log_geometric(spec.gamma.width_ratio, g.dims[i], 1, max_w);
  for (int i = 0; i <= g.q; ++i) {
    lg -= std::log(static_cast<double>(g.dims[i]));  // t_i uniform on 1..d_i
    // S_i uniform over configurations whose largest set has exactly t_i elements
    const double la = log_subsets_upto(g.dims[i], g.eff_dims[i]);
    const double lb = log_subsets_upto(g.dims[i], g.eff_dims[i] - 1);
    lg -= log_pow_diff(la, lb, g.dims[i + 1]);
  }
  std::vector<double> grid = spec.beta_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  lg -= (g.q + 1) * std::log(static_cast<double>(grid.size()));
  return lg;
}

std::size_t PriorWeights::index_of(const CompositionStructure& eta) const {
  for (std::size_t i = 0; i < entries.size(); ++i)
    if (entries[i].structure == eta) return i;
  fail(ErrorKind::Domain, "structure " + structure_label(eta) + " is not in the prior support");
}

PriorWeights structure_prior_weights(const StructurePriorSpec& spec) {
  PriorWeights out;
  std::vector<CompositionStructure> list;
  if (spec.structures) {
    list = *spec.structures;
  } else {
    auto en = enumerate_structures(spec.space, spec.beta_grid);
    list = std::move(en.structures);
    out.note = en.note;
  }
  if (list.empty())
    fail(ErrorKind::Validation, out.note.empty() ? "prior support is empty" : out.note);

  double mx = kNegInf;
  for (auto& eta : list) {
    require_valid(eta);
    WeightedStructure w;
    w.log_gamma = log_gamma(eta, spec);
    w.log_penalty = psi_log_weight(eta, spec.profile, spec.n);
    w.log_weight = LogWeight{w.log_gamma} * w.log_penalty;
    mx = std::max(mx, w.log_weight.log_value);
    w.structure = std::move(eta);
    out.entries.push_back(std::move(w));
  }
  if (mx == kNegInf)
    fail(ErrorKind::Validation,
         "every structure has zero prior weight (the size penalty overflows); lower max_nodes");
  double sum = 0.0;
  for (const auto& e : out.entries)
    if (!e.log_weight.is_zero()) sum += std::exp(e.log_weight.log_value - mx);
  const double lse = mx + std::log(sum);
  for (auto& e : out.entries) {
    if (e.log_weight.is_zero()) continue;
    e.log_weight.log_value -= lse;
    e.weight = std::exp(e.log_weight.log_value);
  }
  return out;
}

std::size_t sample_structure_index(const PriorWeights& w, KeyedRng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < w.entries.size(); ++i) {
    if (w.entries[i].weight <= 0.0) continue;
    acc += w.entries[i].weight;
    last = i;
    if (u < acc) return i;
  }
  return last;  // u beyond a cumulative sum rounded below 1
}

CompositionStructure sample_structure(const PriorWeights& w, KeyedRng& rng) {
  return w.entries[sample_structure_index(w, rng)].structure;
}

NodeState node_template(const CompositionStructure& eta, const StructurePriorSpec& spec, int layer,
                        int output) {
  const auto& set = eta.graph.active_sets.at(layer).at(output);
  NodeState node;
  node.layer = layer;
  node.output = output;
  node.gp.family = spec.profile.family;
  node.gp.beta = eta.betas.at(layer);
  node.gp.r = static_cast<int>(set.size());
  node.gp.n = spec.n;
  node.gp.grid = spec.grid;
  const double slack = layer_slack(eta, spec.profile, spec.n, layer);
  node.conditioning = layer_conditioning(spec.profile, node.gp.beta, node.gp.r, slack);
  return node;
}

std::vector<double> DgpDraw::eval(std::span<const double> points) const { return compose(layers, points); }

DgpDraw sample_dgp(const CompositionStructure& eta, const StructurePriorSpec& spec, const KeyedRng& rng) {
  require_valid(eta);
  DgpDraw d;
  d.structure = eta;
  const auto& g = eta.graph;
  for (int i = 0; i <= g.q; ++i) {
    LayerFunction layer;
    layer.in_dim = g.dims[i];
    const auto stream = rng.child(static_cast<std::uint64_t>(i));
    for (int j = 0; j < g.dims[i + 1]; ++j) {
      auto node = node_template(eta, spec, i, j);
      try {
        auto cs = sample_conditioned(node.gp, node.conditioning, spec.max_attempts,
                                     stream.child(static_cast<std::uint64_t>(j)));
        node.latent = std::move(cs.latent);
        node.stats = cs.stats;
        layer.paths.push_back(std::move(cs.path));
      } catch (const Error& e) {
        fail(e.kind(), "node (layer " + std::to_string(i) + ", output " + std::to_string(j + 1) +
                           "): " + e.what());
      }
      layer.active_sets.push_back(g.active_sets[i][j]);
      d.nodes.push_back(std::move(node));
    }
    d.layers.push_back(std::move(layer));
  }
  return d;
}

PriorDraw sample_prior(const PriorWeights& w, const StructurePriorSpec& spec, const KeyedRng& rng) {
  auto pick = rng.child(0);
  PriorDraw out;
  out.structure_index = sample_structure_index(w, pick);
  out.draw = sample_dgp(w.entries[out.structure_index].structure, spec, rng.child(1));
  return out;
}

}  // namespace deepgp
