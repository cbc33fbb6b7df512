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

#ifndef DEEPGP_FUNCSPACE_HPP
#define DEEPGP_FUNCSPACE_HPP

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "structure.hpp"

namespace deepgp {

// Multilevel nodal hat frame on [-1,1]^r. Level j has 2^j hats per axis,
// centred at the cell midpoints -1 + (2k-1) 2^{-j} with half-width 2^{1-j};
// tensor hats are scaled by 2^{jr/2}. Coefficients are stored level-major,
// with k running row-major over the tensor index (last axis fastest).
struct WaveletCoeffs {
  int r = 1;
  int J = 1;
  std::vector<std::vector<double>> levels;  ///< levels[j-1] has 2^{jr} entries

  static WaveletCoeffs zeros(int r, int J);
  bool operator==(const WaveletCoeffs&) const = default;
};

// Values on the uniform grid {-1 + 2i/(m-1)}^r, row-major (last axis
// fastest), evaluated by multilinear interpolation.
struct GridValues {
  int r = 1;
  int m = 2;
  std::vector<double> values;

  double node(int i) const { return -1.0 + 2.0 * i / (m - 1); }
  static GridValues from_function(int r, int m,
                                  const std::function<double(std::span<const double>)>& fn);
  bool operator==(const GridValues&) const = default;
};

class PathFunction {
 public:
  using Repr = std::variant<WaveletCoeffs, GridValues>;

  PathFunction() : PathFunction(GridValues{1, 2, {0.0, 0.0}}) {}
  explicit PathFunction(Repr repr, bool range_clip = true);

  int dim() const;
  bool range_clip() const { return clip_; }
  bool is_wavelet() const { return std::holds_alternative<WaveletCoeffs>(repr_); }
  const WaveletCoeffs& wavelet() const;
  const GridValues& grid() const;
  const Repr& repr() const { return repr_; }

  /// Inputs outside [-1,1] are clamped first.
  double eval(std::span<const double> u) const;

  /// Exact sup norm of the (unclipped) path.
  double sup_norm() const;

  /// Lattice on which the unclipped path is piecewise multilinear.
  GridValues as_grid() const;

  bool operator==(const PathFunction&) const = default;

 private:
  Repr repr_;
  bool clip_ = true;
};

double eval_wavelet(const WaveletCoeffs& w, std::span<const double> u);
double eval_grid(const GridValues& g, std::span<const double> u);

/// Component paths of one layer; component j reads the coordinates S_j.
struct LayerFunction {
  int in_dim = 1;
  std::vector<PathFunction> paths;
  std::vector<IndexSet> active_sets;

  int out_dim() const { return static_cast<int>(paths.size()); }
  void check() const;
  void eval(std::span<const double> x, std::span<double> y) const;
};

/// Evaluates h_q o ... o h_0 at points stored row-major with d_0 coordinates
/// each. Returns d_{q+1} outputs per point.
std::vector<double> compose(std::span<const LayerFunction> layers, std::span<const double> points);

struct HolderNorm {
  double value = 0.0;
  bool coarse_grid = false;   ///< grid too coarse for the requested smoothness
  bool near_integer = false;  ///< beta within 0.05 of an integer
};

/// Finite-difference surrogate of the weighted Hoelder norm on an m^r grid.
/// Supports floor(beta) <= 2.
HolderNorm holder_norm_empirical(const PathFunction& f, double beta, int grid_m);

/// sup_j 2^{j(beta + r/2)} max_k |lambda_{j,k}|.
double besov_norm(const WaveletCoeffs& w, double beta);

enum class ConditioningMode { BesovCoeffBall, EmpiricalHolder };

std::string to_string(ConditioningMode m);
ConditioningMode conditioning_mode_from_string(const std::string& s);

struct ConditioningSpec {
  double beta = 1.0;
  int r = 1;
  double K = 1.0;
  double slack = 1e-3;
  ConditioningMode mode = ConditioningMode::BesovCoeffBall;
  double sup_bound = 1.0;
  int holder_grid = 0;  ///< 0: use the path's own grid
};

struct ConditioningCheck {
  bool inside = false;
  double sup_norm = 0.0;
  double sup_margin = 0.0;     ///< sup_bound - sup_norm
  double smooth_norm = 0.0;    ///< Besov or empirical Hoelder norm
  double smooth_margin = 0.0;  ///< radius - smooth_norm
  std::string message;
};

ConditioningCheck in_conditioning_set(const PathFunction& f, const ConditioningSpec& spec);

/// sup over a product grid of |h_i - h~_i|_inf for two layers on the same input space.
double layer_sup_distance(const LayerFunction& a, const LayerFunction& b, int grid_m);

struct GapBound {
  double bound = 0.0;
  std::vector<double> layer_gaps;
};

/// K^q sum_i (eta_i^{alpha_i} + ||h_i - h~_i||^{alpha_i}); K >= 1.
GapBound composition_gap_bound(std::span<const LayerFunction> h,
                               std::span<const LayerFunction> h_tilde,
                               std::span<const double> betas, double K,
                               std::span<const double> etas, int grid_m);

/// Max of |f(x) - f~(x)| over the given points.
double measured_gap(std::span<const LayerFunction> h, std::span<const LayerFunction> h_tilde,
                    std::span<const double> points);

struct CoveringCount {
  std::uint64_t class_size = 0;
  std::uint64_t upper = 0;  ///< size of an explicit delta-cover
  std::uint64_t lower = 0;  ///< size of a 2 delta-separated packing
  double log_bound = 0.0;   ///< Q_1 delta^{-1/beta}
};

/// Covering numbers of piecewise-linear functions on `intervals` uniform
/// cells of [-1,1] with node values on the delta/2 lattice inside [-1,1]
/// and |v_a - v_b| <= K |x_a - x_b|^beta. r = 1 and beta <= 1 only.
/// intervals = 0 picks round(4/delta).
CoveringCount covering_number_oracle(double beta, double K, double delta, int intervals = 0,
                                     std::uint64_t budget = 5'000'000);

json to_json(const WaveletCoeffs& w);
WaveletCoeffs wavelet_from_json(const json& j, const std::string& pointer = "");

}  // namespace deepgp

#endif  // DEEPGP_FUNCSPACE_HPP
