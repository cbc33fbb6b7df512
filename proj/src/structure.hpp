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

#ifndef DEEPGP_STRUCTURE_HPP
#define DEEPGP_STRUCTURE_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "json_util.hpp"

namespace deepgp {

/// Sorted, duplicate-free, 1-based coordinate indices.
using IndexSet = std::vector<int>;

/// Layered composition graph lambda = (q, d, t, S).
///
/// dims holds d_0..d_{q+1} (d_{q+1} = 1), eff_dims holds t_0..t_q followed by
/// a trailing 1, and active_sets[i][j] lists the inputs of layer i read by
/// output j. The struct may hold invalid data; validate_graph() reports it.
struct CompositionGraph {
  int q = 0;
  std::vector<int> dims;
  std::vector<int> eff_dims;
  std::vector<std::vector<IndexSet>> active_sets;

  /// |d|_1 = 1 + sum_{i=0}^q d_i.
  int node_count() const;

  int input_dim() const { return dims.empty() ? 0 : dims.front(); }

  /// Number of (layer, output) nodes, i.e. sum_{i=0}^q d_{i+1}.
  int component_count() const;

  /// Builds a graph from dims and active sets, sorting/deduplicating the sets
  /// and deriving t_i = max_j |S_ij|.
  static CompositionGraph from_sets(std::vector<int> dims,
                                    std::vector<std::vector<IndexSet>> sets);

  bool operator==(const CompositionGraph&) const = default;
};

struct BetaBounds {
  double lo = 0.5;
  double hi = 1.0;
  bool operator==(const BetaBounds&) const = default;
};

/// eta = (lambda, beta).
struct CompositionStructure {
  CompositionGraph graph;
  std::vector<double> betas;
  BetaBounds bounds;

  int q() const { return graph.q; }
  bool operator==(const CompositionStructure&) const = default;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

ValidationReport validate_graph(const CompositionGraph& g);

/// Graph checks plus beta length and bounds.
ValidationReport validate_structure(const CompositionStructure& eta);

/// Throws a validation error listing every violation.
void require_valid(const CompositionStructure& eta);

/// Desk-scale truncation of the graph space.
struct StructureSpace {
  int input_dim = 1;
  int max_q = 1;
  int max_width = 2;
  int max_nodes = 8;
  BetaBounds bounds;
  std::size_t max_count = 1'000'000;
};

struct EnumerationResult {
  std::vector<CompositionStructure> structures;
  std::string note;
};

/// Every valid structure of the space with betas drawn from beta_grid for
/// each layer, ordered lexicographically in (q, d, S, beta).
EnumerationResult enumerate_structures(const StructureSpace& space,
                                       const std::vector<double>& beta_grid);

/// Graphs only, same order as enumerate_structures.
std::vector<CompositionGraph> enumerate_graphs(const StructureSpace& space);

struct ReduceResult {
  CompositionStructure structure;
  bool applicable = false;
  int removed_layers = 0;
};

/// Collapses consecutive one-dimensional layers (t_{j-1} = t_j = 1) into one
/// layer with smoothness beta_{j-1} * beta_j. Only valid when beta_+ <= 1 and
/// the Hoelder radius is 1; otherwise returns the input with
/// applicable = false.
ReduceResult reduce_redundant(const CompositionStructure& eta, double holder_radius = 1.0);

json to_json(const CompositionGraph& g);
json to_json(const CompositionStructure& eta);
CompositionGraph graph_from_json(const json& j, const std::string& pointer = "");
CompositionStructure structure_from_json(const json& j, const std::string& pointer = "");

/// Compact unique label such as "q0_d2-1_t2_S1.2_b1".
std::string structure_label(const CompositionStructure& eta);

}  // namespace deepgp

#endif  // DEEPGP_STRUCTURE_HPP
