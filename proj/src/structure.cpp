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

#include "structure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "format.hpp"

namespace deepgp {

int CompositionGraph::node_count() const {
  int total = 1;
  for (int i = 0; i <= q && i < static_cast<int>(dims.size()); ++i) total += dims[i];
  return total;
}

int CompositionGraph::component_count() const {
  int total = 0;
  for (int i = 1; i <= q + 1 && i < static_cast<int>(dims.size()); ++i) total += dims[i];
  return total;
}

CompositionGraph CompositionGraph::from_sets(std::vector<int> dims,
                                             std::vector<std::vector<IndexSet>> sets) {
  CompositionGraph g;
  g.q = static_cast<int>(dims.size()) - 2;
  g.dims = std::move(dims);
  g.active_sets = std::move(sets);
  g.eff_dims.clear();
  for (auto& layer : g.active_sets) {
    int t = 0;
    for (auto& s : layer) {
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
      t = std::max(t, static_cast<int>(s.size()));
    }
    g.eff_dims.push_back(t);
  }
  g.eff_dims.push_back(1);
  return g;
}

ValidationReport validate_graph(const CompositionGraph& g) {
  ValidationReport rep;
  auto bad = [&](std::string msg) {
    rep.ok = false;
    rep.violations.push_back(std::move(msg));
  };
  if (g.q < 0) {
    bad("q must be non-negative");
    return rep;
  }
  const auto layers = static_cast<std::size_t>(g.q) + 1;
  if (g.dims.size() != layers + 1) {
    bad("dims must have q+2 entries");
    return rep;
  }
  if (g.dims.back() != 1) bad("d_{q+1} must equal 1");
  for (std::size_t i = 0; i < g.dims.size(); ++i)
    if (g.dims[i] < 1) bad("d_" + std::to_string(i) + " must be >= 1");
  if (g.eff_dims.size() != layers + 1) {
    bad("eff_dims must have q+2 entries");
  } else {
    if (g.eff_dims.back() != 1) bad("trailing eff_dims entry must equal 1");
    for (std::size_t i = 0; i < g.eff_dims.size(); ++i)
      if (g.eff_dims[i] < 1) bad("t_" + std::to_string(i) + " must be >= 1");
  }
  if (g.active_sets.size() != layers) {
    bad("active_sets must have q+1 layers");
    return rep;
  }
  for (std::size_t i = 0; i < layers; ++i) {
    const auto& layer = g.active_sets[i];
    if (static_cast<int>(layer.size()) != g.dims[i + 1]) {
      bad("layer " + std::to_string(i) + " must have d_" + std::to_string(i + 1) +
          " active sets");
      continue;
    }
    int tmax = 0;
    for (std::size_t j = 0; j < layer.size(); ++j) {
      const auto& s = layer[j];
      const std::string name = "S_" + std::to_string(i) + "," + std::to_string(j + 1);
      if (s.empty()) bad(name + " is empty");
      if (!std::is_sorted(s.begin(), s.end())) bad(name + " is not sorted");
      if (std::adjacent_find(s.begin(), s.end()) != s.end()) bad(name + " has duplicates");
      for (int idx : s)
        if (idx < 1 || idx > g.dims[i])
          bad(name + " index " + std::to_string(idx) + " outside [1, d_" +
              std::to_string(i) + "]");
      tmax = std::max(tmax, static_cast<int>(s.size()));
    }
    if (g.eff_dims.size() == layers + 1 && g.eff_dims[i] != tmax)
      bad("t_" + std::to_string(i) + " != max_j |S_" + std::to_string(i) + "j| (expected " +
          std::to_string(tmax) + ", got " + std::to_string(g.eff_dims[i]) + ")");
  }
  return rep;
}

ValidationReport validate_structure(const CompositionStructure& eta) {
  ValidationReport rep = validate_graph(eta.graph);
  auto bad = [&](std::string msg) {
    rep.ok = false;
    rep.violations.push_back(std::move(msg));
  };
  const auto& b = eta.bounds;
  if (!(b.lo > 0.0 && b.lo <= b.hi && std::isfinite(b.hi)))
    bad("beta bounds must satisfy 0 < beta_- <= beta_+ < inf");
  if (eta.betas.size() != static_cast<std::size_t>(eta.graph.q) + 1) {
    bad("betas must have q+1 entries");
  } else {
    for (std::size_t i = 0; i < eta.betas.size(); ++i)
      if (!(eta.betas[i] >= b.lo && eta.betas[i] <= b.hi))
        bad("beta_" + std::to_string(i) + " outside [beta_-, beta_+]");
  }
  return rep;
}

void require_valid(const CompositionStructure& eta) {
  auto rep = validate_structure(eta);
  if (rep.ok) return;
  std::string msg = "invalid composition structure:";
  for (const auto& v : rep.violations) msg += " " + v + ";";
  fail(ErrorKind::Validation, msg);
}

namespace {

// Nonempty subsets of {1..d}, lexicographic as sorted vectors.
std::vector<IndexSet> subsets_lex(int d) {
  std::vector<IndexSet> out;
  IndexSet cur;
  auto rec = [&](auto&& self, int next) -> void {
    for (int v = next; v <= d; ++v) {
      cur.push_back(v);
      out.push_back(cur);
      self(self, v + 1);
      cur.pop_back();
    }
  };
  rec(rec, 1);
  return out;
}

// Mixed-radix increment, last digit fastest. False once it wraps around.
bool advance(std::vector<std::size_t>& digit, const std::vector<std::size_t>& radix) {
  for (std::size_t pos = digit.size(); pos > 0; --pos) {
    if (++digit[pos - 1] < radix[pos - 1]) return true;
    digit[pos - 1] = 0;
  }
  return false;
}

}  // namespace

std::vector<CompositionGraph> enumerate_graphs(const StructureSpace& space) {
  if (space.input_dim < 1 || space.max_q < 0 || space.max_width < 1 || space.max_nodes < 1)
    fail(ErrorKind::Validation, "structure space caps must be positive");
  std::vector<CompositionGraph> graphs;
  for (int q = 0; q <= space.max_q; ++q) {
    std::vector<std::size_t> hidden(static_cast<std::size_t>(q), 0);  // d_i - 1
    const std::vector<std::size_t> width_radix(hidden.size(),
                                               static_cast<std::size_t>(space.max_width));
    do {
      std::vector<int> dims{space.input_dim};
      for (auto h : hidden) dims.push_back(static_cast<int>(h) + 1);
      dims.push_back(1);
      int nodes = 1;
      for (int i = 0; i <= q; ++i) nodes += dims[i];
      if (nodes > space.max_nodes) continue;

      // one digit per (layer, output); layer 0 output 1 is most significant
      std::vector<std::vector<IndexSet>> choices;
      std::vector<std::pair<int, int>> slots;
      for (int i = 0; i <= q; ++i)
        for (int j = 0; j < dims[i + 1]; ++j) {
          choices.push_back(subsets_lex(dims[i]));
          slots.emplace_back(i, j);
        }
      std::vector<std::size_t> radix;
      for (const auto& c : choices) radix.push_back(c.size());
      std::vector<std::size_t> digit(choices.size(), 0);
      do {
        std::vector<std::vector<IndexSet>> sets(static_cast<std::size_t>(q) + 1);
        for (int i = 0; i <= q; ++i) sets[i].resize(static_cast<std::size_t>(dims[i + 1]));
        for (std::size_t s = 0; s < slots.size(); ++s)
          sets[slots[s].first][slots[s].second] = choices[s][digit[s]];
        graphs.push_back(CompositionGraph::from_sets(dims, std::move(sets)));
        if (graphs.size() > space.max_count)
          fail(ErrorKind::Resource, "structure space too large: more than " +
                                        std::to_string(space.max_count) + " graphs");
      } while (advance(digit, radix));
    } while (advance(hidden, width_radix));
  }
  return graphs;
}

EnumerationResult enumerate_structures(const StructureSpace& space,
                                       const std::vector<double>& beta_grid) {
  if (beta_grid.empty()) fail(ErrorKind::Validation, "beta grid is empty");
  for (double b : beta_grid)
    if (!(b >= space.bounds.lo && b <= space.bounds.hi))
      fail(ErrorKind::Validation, "beta grid value " + format_real(b) + " outside bounds");
  std::vector<double> grid = beta_grid;
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  EnumerationResult res;
  const auto graphs = enumerate_graphs(space);
  if (graphs.empty()) {
    res.note = "no admissible graph: the smallest graph has |d|_1 = " +
               std::to_string(1 + space.input_dim) + " > max_nodes = " +
               std::to_string(space.max_nodes);
    return res;
  }
  for (const auto& g : graphs) {
    const auto layers = static_cast<std::size_t>(g.q) + 1;
    std::vector<std::size_t> digit(layers, 0);
    const std::vector<std::size_t> radix(layers, grid.size());
    do {
      CompositionStructure eta{g, {}, space.bounds};
      for (auto d : digit) eta.betas.push_back(grid[d]);
      res.structures.push_back(std::move(eta));
      if (res.structures.size() > space.max_count)
        fail(ErrorKind::Resource, "structure space too large: more than " +
                                      std::to_string(space.max_count) + " structures");
    } while (advance(digit, radix));
  }
  return res;
}

ReduceResult reduce_redundant(const CompositionStructure& eta, double holder_radius) {
  ReduceResult res{eta, false, 0};
  if (!(eta.bounds.hi <= 1.0) || holder_radius != 1.0) return res;
  res.applicable = true;
  auto& cur = res.structure;
  while (true) {
    int hit = -1;
    for (int j = cur.graph.q; j >= 1; --j) {
      if (cur.graph.eff_dims[j] == 1 && cur.graph.eff_dims[j - 1] == 1) {
        hit = j;
        break;
      }
    }
    if (hit < 0) break;
    const auto j = static_cast<std::size_t>(hit);
    auto& g = cur.graph;
    // output k of the merged layer reads what its single predecessor read
    std::vector<IndexSet> merged;
    for (const auto& s : g.active_sets[j]) merged.push_back(g.active_sets[j - 1][s.front() - 1]);
    g.active_sets[j - 1] = std::move(merged);
    g.active_sets.erase(g.active_sets.begin() + static_cast<std::ptrdiff_t>(j));
    g.dims.erase(g.dims.begin() + static_cast<std::ptrdiff_t>(j));
    g.eff_dims.erase(g.eff_dims.begin() + static_cast<std::ptrdiff_t>(j));
    g.q -= 1;
    cur.betas[j - 1] *= cur.betas[j];
    cur.betas.erase(cur.betas.begin() + static_cast<std::ptrdiff_t>(j));
    ++res.removed_layers;
  }
  // collapsed smoothness may drop below the original lower bound
  for (double b : cur.betas) cur.bounds.lo = std::min(cur.bounds.lo, b);
  return res;
}

json to_json(const CompositionGraph& g) {
  return json{{"q", g.q},
              {"dims", g.dims},
              {"eff_dims", g.eff_dims},
              {"active_sets", g.active_sets}};
}

json to_json(const CompositionStructure& eta) {
  json j = to_json(eta.graph);
  j["betas"] = eta.betas;
  j["beta_bounds"] = {eta.bounds.lo, eta.bounds.hi};
  return j;
}

namespace {

CompositionGraph read_graph(FieldReader& r) {
  CompositionGraph g;
  g.dims = r.get<std::vector<int>>("dims");
  require(g.dims.size() >= 2, "dims needs at least d_0 and the output width", r.at("dims"));
  // q is implied by dims; an explicit value must agree (validate_graph checks)
  g.q = r.has("q") ? r.get<int>("q") : static_cast<int>(g.dims.size()) - 2;
  g.active_sets = r.get<std::vector<std::vector<IndexSet>>>("active_sets");
  if (r.has("eff_dims")) {
    g.eff_dims = r.get<std::vector<int>>("eff_dims");
  } else {
    auto derived = CompositionGraph::from_sets(g.dims, g.active_sets);
    g.eff_dims = derived.eff_dims;
  }
  return g;
}

}  // namespace

CompositionGraph graph_from_json(const json& j, const std::string& pointer) {
  FieldReader r(j, pointer);
  auto g = read_graph(r);
  r.finish();
  return g;
}

CompositionStructure structure_from_json(const json& j, const std::string& pointer) {
  FieldReader r(j, pointer);
  CompositionStructure eta;
  eta.graph = read_graph(r);
  eta.betas = r.get<std::vector<double>>("betas");
  require(!eta.betas.empty(), "betas must not be empty", r.at("betas"));
  if (r.has("beta_bounds")) {
    auto b = r.get<std::vector<double>>("beta_bounds");
    require(b.size() == 2, "beta_bounds must have two entries", r.at("beta_bounds"));
    eta.bounds = {b[0], b[1]};
  } else {
    eta.bounds = {*std::min_element(eta.betas.begin(), eta.betas.end()),
                  *std::max_element(eta.betas.begin(), eta.betas.end())};
  }
  r.finish();
  return eta;
}

std::string structure_label(const CompositionStructure& eta) {
  std::ostringstream os;
  os << "q" << eta.graph.q << "_d";
  for (std::size_t i = 0; i < eta.graph.dims.size(); ++i)
    os << (i ? "-" : "") << eta.graph.dims[i];
  os << "_t";
  for (std::size_t i = 0; i + 1 < eta.graph.eff_dims.size(); ++i)
    os << (i ? "-" : "") << eta.graph.eff_dims[i];
  os << "_S";
  for (std::size_t i = 0; i < eta.graph.active_sets.size(); ++i) {
    os << (i ? "/" : "");
    for (std::size_t j = 0; j < eta.graph.active_sets[i].size(); ++j) {
      os << (j ? "|" : "");
      const auto& set = eta.graph.active_sets[i][j];
      for (std::size_t k = 0; k < set.size(); ++k) os << (k ? "." : "") << set[k];
    }
  }
  os << "_b";
  for (std::size_t i = 0; i < eta.betas.size(); ++i)
    os << (i ? "-" : "") << format_short(eta.betas[i]);
  return os.str();
}

}  // namespace deepgp
