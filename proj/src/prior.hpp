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

#ifndef DEEPGP_PRIOR_HPP
#define DEEPGP_PRIOR_HPP

#include <optional>
#include <vector>

#include "gp.hpp"
#include "rates.hpp"
#include "structure.hpp"

namespace deepgp {

/// Base density gamma: geometric on q and on each hidden width, both truncated
/// to the space, then uniform on t, on S given t, and on the beta grid.
struct GammaSpec {
  double q_ratio = 0.5;      ///< gamma(q) proportional to q_ratio^q
  double width_ratio = 0.5;  ///< gamma(d_i) proportional to width_ratio^{d_i}
};

struct StructurePriorSpec {
  StructureSpace space;
  std::vector<double> beta_grid{0.5, 0.75, 1.0};
  GammaSpec gamma;
  RateProfile profile;
  double n = 1000;
  /// When set, the prior lives on exactly these structures instead of the
  /// enumerated space (gamma is still evaluated, then renormalized).
  std::optional<std::vector<CompositionStructure>> structures;
  int max_attempts = 10000;  ///< rejection budget per node
  int grid = 0;              ///< grid resolution for grid families
};

json to_json(const StructurePriorSpec& s);
StructurePriorSpec prior_spec_from_json(const json& j, const std::string& pointer = "");

/// log gamma(eta). Sums to one over the enumerated space unless the node cap
/// removes structures; prior weights renormalize either way.
double log_gamma(const CompositionStructure& eta, const StructurePriorSpec& spec);

struct WeightedStructure {
  CompositionStructure structure;
  double log_gamma = 0.0;
  LogWeight log_penalty;  ///< -Psi_n(eta)
  LogWeight log_weight;   ///< normalized
  double weight = 0.0;
};

struct PriorWeights {
  std::vector<WeightedStructure> entries;
  std::string note;

  std::size_t index_of(const CompositionStructure& eta) const;
};

PriorWeights structure_prior_weights(const StructurePriorSpec& spec);

std::size_t sample_structure_index(const PriorWeights& w, KeyedRng& rng);
CompositionStructure sample_structure(const PriorWeights& w, KeyedRng& rng);

struct NodeState {
  int layer = 0;
  int output = 0;  ///< 0-based component index
  GpSpec gp;
  ConditioningSpec conditioning;
  std::vector<double> latent;
  ConditionedSampleStats stats;
};

struct DgpDraw {
  CompositionStructure structure;
  std::vector<LayerFunction> layers;
  std::vector<NodeState> nodes;  ///< layer-major

  std::vector<double> eval(std::span<const double> points) const;
  PathFunction& path(const NodeState& node) { return layers[node.layer].paths[node.output]; }
  const PathFunction& path(const NodeState& node) const {
    return layers[node.layer].paths[node.output];
  }
};

/// GP spec and conditioning set of node (i, j).
NodeState node_template(const CompositionStructure& eta, const StructurePriorSpec& spec, int layer,
                        int output);

DgpDraw sample_dgp(const CompositionStructure& eta, const StructurePriorSpec& spec, const KeyedRng& rng);

struct PriorDraw {
  std::size_t structure_index = 0;
  DgpDraw draw;
};

PriorDraw sample_prior(const PriorWeights& w, const StructurePriorSpec& spec, const KeyedRng& rng);

}  // namespace deepgp

#endif  // DEEPGP_PRIOR_HPP
