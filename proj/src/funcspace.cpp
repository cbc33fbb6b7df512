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

#include "funcspace.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <set>

#include "rates.hpp"

namespace deepgp {

namespace {

std::size_t ipow(std::size_t base, int e) {
  std::size_t out = 1;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

double clamp1(double v) { return std::clamp(v, -1.0, 1.0); }

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

WaveletCoeffs WaveletCoeffs::zeros(int r, int J) {
  if (r < 1 || J < 1) fail(ErrorKind::Domain, "wavelet coefficients need r >= 1 and J >= 1");
  WaveletCoeffs w{r, J, {}};
  for (int j = 1; j <= J; ++j) w.levels.emplace_back(ipow(std::size_t{1} << j, r), 0.0);
  return w;
}

GridValues GridValues::from_function(int r, int m,
                                     const std::function<double(std::span<const double>)>& fn) {
  if (r < 1 || m < 2) fail(ErrorKind::Domain, "grid needs r >= 1 and m >= 2");
  GridValues g{r, m, std::vector<double>(ipow(m, r))};
  std::vector<double> u(r);
  for (std::size_t idx = 0; idx < g.values.size(); ++idx) {
    std::size_t rest = idx;
    for (int a = r - 1; a >= 0; --a) {
      u[a] = g.node(static_cast<int>(rest % m));
      rest /= m;
    }
    g.values[idx] = fn(u);
  }
  return g;
}

double eval_wavelet(const WaveletCoeffs& w, std::span<const double> u) {
  const int r = w.r;
  double total = 0.0;
  std::vector<std::array<std::pair<std::size_t, double>, 2>> hats(r);
  std::vector<int> nh(r);
  for (int j = 1; j <= w.J; ++j) {
    const std::size_t per_axis = std::size_t{1} << j;
    const double width = std::ldexp(1.0, 1 - j);
    bool empty = false;
    for (int a = 0; a < r; ++a) {
      const double x = (clamp1(u[a]) + 1.0) / width - 0.5;
      const double base = std::floor(x);
      nh[a] = 0;
      for (int s = 0; s < 2; ++s) {
        const double idx = base + s;
        if (idx < 0 || idx >= static_cast<double>(per_axis)) continue;
        const double wt = 1.0 - std::abs(x - idx);
        if (wt > 0) hats[a][nh[a]++] = {static_cast<std::size_t>(idx), wt};
      }
      if (nh[a] == 0) empty = true;
    }
    if (empty) continue;
    const auto& lam = w.levels[j - 1];
    double level = 0.0;
    // enumerate the (at most 2^r) active tensor hats
    const int combos = 1 << r;
    for (int c = 0; c < combos; ++c) {
      std::size_t k = 0;
      double wt = 1.0;
      bool ok = true;
      for (int a = 0; a < r; ++a) {
        const int s = (c >> (r - 1 - a)) & 1;
        if (s >= nh[a]) {
          ok = false;
          break;
        }
        k = k * per_axis + hats[a][s].first;
        wt *= hats[a][s].second;
      }
      if (ok) level += lam[k] * wt;
    }
    total += level * std::pow(2.0, 0.5 * j * r);
  }
  return total;
}

double eval_grid(const GridValues& g, std::span<const double> u) {
  const int r = g.r;
  std::vector<std::size_t> lo(r);
  std::vector<double> t(r);
  for (int a = 0; a < r; ++a) {
    const double p = (clamp1(u[a]) + 1.0) * 0.5 * (g.m - 1);
    const auto i0 = std::min<std::size_t>(static_cast<std::size_t>(std::floor(p)), g.m - 2);
    lo[a] = i0;
    t[a] = p - static_cast<double>(i0);
  }
  double out = 0.0;
  for (int c = 0; c < (1 << r); ++c) {
    std::size_t idx = 0;
    double wt = 1.0;
    for (int a = 0; a < r; ++a) {
      const int s = (c >> (r - 1 - a)) & 1;
      idx = idx * g.m + lo[a] + s;
      wt *= s ? t[a] : 1.0 - t[a];
    }
    if (wt != 0.0) out += wt * g.values[idx];
  }
  return out;
}

PathFunction::PathFunction(Repr repr, bool range_clip) : repr_(std::move(repr)), clip_(range_clip) {
  if (auto* w = std::get_if<WaveletCoeffs>(&repr_)) {
    if (w->r < 1 || w->J < 1 || static_cast<int>(w->levels.size()) != w->J)
      fail(ErrorKind::Domain, "malformed wavelet coefficients");
    for (int j = 1; j <= w->J; ++j)
      if (w->levels[j - 1].size() != ipow(std::size_t{1} << j, w->r))
        fail(ErrorKind::Domain, "wavelet level " + std::to_string(j) + " has the wrong size");
  } else {
    const auto& g = std::get<GridValues>(repr_);
    if (g.r < 1 || g.m < 2 || g.values.size() != ipow(g.m, g.r))
      fail(ErrorKind::Domain, "malformed grid values");
  }
}

int PathFunction::dim() const {
  return std::visit([](const auto& x) { return x.r; }, repr_);
}

const WaveletCoeffs& PathFunction::wavelet() const {
  if (!is_wavelet()) fail(ErrorKind::Domain, "path is grid-backed, not wavelet-backed");
  return std::get<WaveletCoeffs>(repr_);
}

const GridValues& PathFunction::grid() const {
  if (is_wavelet()) fail(ErrorKind::Domain, "path is wavelet-backed, not grid-backed");
  return std::get<GridValues>(repr_);
}

double PathFunction::eval(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim()) fail(ErrorKind::Domain, "evaluation point has the wrong dimension");
  const double v = is_wavelet() ? eval_wavelet(std::get<WaveletCoeffs>(repr_), u)
                                : eval_grid(std::get<GridValues>(repr_), u);
  return clip_ ? clamp1(v) : v;
}

GridValues PathFunction::as_grid() const {
  if (!is_wavelet()) return std::get<GridValues>(repr_);
  const auto& w = std::get<WaveletCoeffs>(repr_);
  // every hat breakpoint lies on the 2^{-J} lattice
  const int m = (1 << (w.J + 1)) + 1;
  return GridValues::from_function(w.r, m, [&](std::span<const double> u) { return eval_wavelet(w, u); });
}

double PathFunction::sup_norm() const {
  const auto g = as_grid();
  double s = 0.0;
  for (double v : g.values) s = std::max(s, std::abs(v));
  return s;
}

void LayerFunction::check() const {
  if (paths.size() != active_sets.size())
    fail(ErrorKind::Domain, "layer has mismatched paths and active sets");
  for (std::size_t j = 0; j < paths.size(); ++j) {
    const auto& s = active_sets[j];
    if (static_cast<int>(s.size()) != paths[j].dim())
      fail(ErrorKind::Domain, "component " + std::to_string(j + 1) + " reads " +
                                  std::to_string(s.size()) + " inputs but its path has dimension " +
                                  std::to_string(paths[j].dim()));
    for (int k : s)
      if (k < 1 || k > in_dim) fail(ErrorKind::Domain, "active set index out of range");
  }
}

void LayerFunction::eval(std::span<const double> x, std::span<double> y) const {
  double buf[16];
  std::vector<double> big;
  for (std::size_t j = 0; j < paths.size(); ++j) {
    const auto& s = active_sets[j];
    double* dst = buf;
    if (s.size() > 16) {
      big.resize(s.size());
      dst = big.data();
    }
    for (std::size_t a = 0; a < s.size(); ++a) dst[a] = x[s[a] - 1];
    y[j] = paths[j].eval(std::span<const double>(dst, s.size()));
  }
}

std::vector<double> compose(std::span<const LayerFunction> layers, std::span<const double> points) {
  if (layers.empty()) fail(ErrorKind::Domain, "compose needs at least one layer");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].check();
    if (i > 0 && layers[i].in_dim != layers[i - 1].out_dim())
      fail(ErrorKind::Domain, "layer " + std::to_string(i) + " expects " +
                                  std::to_string(layers[i].in_dim) + " inputs but receives " +
                                  std::to_string(layers[i - 1].out_dim()));
  }
  const auto d0 = static_cast<std::size_t>(layers.front().in_dim);
  if (points.size() % d0 != 0) fail(ErrorKind::Domain, "point buffer is not a multiple of d_0");
  const std::size_t npts = points.size() / d0;
  const auto dout = static_cast<std::size_t>(layers.back().out_dim());
  std::vector<double> out(npts * dout);
  std::vector<double> x, y;
  for (std::size_t p = 0; p < npts; ++p) {
    x.assign(points.begin() + p * d0, points.begin() + (p + 1) * d0);
    for (const auto& layer : layers) {
      y.assign(layer.out_dim(), 0.0);
      layer.eval(x, y);
      std::swap(x, y);
    }
    std::copy(x.begin(), x.end(), out.begin() + p * dout);
  }
  return out;
}

namespace {

// d/du along `axis` of grid data: central differences inside, second-order
// one-sided differences at both ends.
std::vector<double> diff_axis(const std::vector<double>& f, int r, int m, int axis, double h) {
  std::vector<double> out(f.size());
  const std::size_t stride = ipow(m, r - 1 - axis);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const auto i = static_cast<int>((idx / stride) % m);
    if (i == 0)
      out[idx] = (-3 * f[idx] + 4 * f[idx + stride] - f[idx + 2 * stride]) / (2 * h);
    else if (i == m - 1)
      out[idx] = (3 * f[idx] - 4 * f[idx - stride] + f[idx - 2 * stride]) / (2 * h);
    else
      out[idx] = (f[idx + stride] - f[idx - stride]) / (2 * h);
  }
  return out;
}

void multi_indices(int r, int order, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == r - 1) {
    cur.push_back(order);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (int k = order; k >= 0; --k) {
    cur.push_back(k);
    multi_indices(r, order - k, cur, out);
    cur.pop_back();
  }
}

// sup_{x != y} |g(x) - g(y)| / |x - y|_inf^gamma on the grid.
double holder_quotient(const std::vector<double>& g, int r, int m, double gamma) {
  if (gamma == 0.0) {
    auto [lo, hi] = std::minmax_element(g.begin(), g.end());
    return *hi - *lo;
  }
  const std::size_t n = g.size();
  if (n > 20000) fail(ErrorKind::Domain, "grid too large for the pairwise Hoelder quotient");
  const double h = 2.0 / (m - 1);
  std::vector<int> coord(n * r);
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t rest = idx;
    for (int a = r - 1; a >= 0; --a) {
      coord[idx * r + a] = static_cast<int>(rest % m);
      rest /= m;
    }
  }
  // |x-y|_inf^gamma depends only on the integer lattice distance
  std::vector<double> denom(m);
  for (int k = 1; k < m; ++k) denom[k] = std::pow(k * h, gamma);
  double best = 0.0;
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t y = x + 1; y < n; ++y) {
      int dist = 0;
      for (int a = 0; a < r; ++a) dist = std::max(dist, std::abs(coord[x * r + a] - coord[y * r + a]));
      best = std::max(best, std::abs(g[x] - g[y]) / denom[dist]);
    }
  }
  return best;
}

}  // namespace

HolderNorm holder_norm_empirical(const PathFunction& f, double beta, int grid_m) {
  if (!(beta > 0.0)) fail(ErrorKind::Domain, "Hoelder norm needs beta > 0");
  const int s = static_cast<int>(std::floor(beta));
  if (s > 2) fail(ErrorKind::Domain, "empirical Hoelder norm supports floor(beta) <= 2");
  GridValues g;
  if (grid_m <= 0) {
    g = f.as_grid();
  } else {
    if (grid_m < 8) fail(ErrorKind::Domain, "Hoelder grid needs at least 8 points per axis");
    g = GridValues::from_function(f.dim(), grid_m, [&](std::span<const double> u) { return f.eval(u); });
  }
  if (g.m < 3) fail(ErrorKind::Domain, "Hoelder grid needs at least 3 points per axis");
  const int r = g.r, m = g.m;
  const double h = 2.0 / (m - 1);
  const double frac = beta - s;

  HolderNorm out;
  out.coarse_grid = (m - 1) < 16 * (s + 1);
  out.near_integer = std::abs(beta - std::round(beta)) < 0.05;

  auto derivative = [&](const std::vector<int>& a) {
    std::vector<double> d = g.values;
    for (int axis = 0; axis < r; ++axis)
      for (int k = 0; k < a[axis]; ++k) d = diff_axis(d, r, m, axis, h);
    return d;
  };

  double lower = 0.0;
  for (int order = 0; order < s; ++order) {
    std::vector<std::vector<int>> idx;
    std::vector<int> cur;
    multi_indices(r, order, cur, idx);
    for (const auto& a : idx) {
      const auto d = derivative(a);
      double sup = 0.0;
      for (double v : d) sup = std::max(sup, std::abs(v));
      lower += sup;
    }
  }
  double top = 0.0;
  {
    std::vector<std::vector<int>> idx;
    std::vector<int> cur;
    multi_indices(r, s, cur, idx);
    for (const auto& a : idx) top += holder_quotient(derivative(a), r, m, frac);
  }
  out.value = 2.0 * r * lower + std::pow(2.0, frac) * top;
  return out;
}

double besov_norm(const WaveletCoeffs& w, double beta) {
  double best = 0.0;
  for (int j = 1; j <= static_cast<int>(w.levels.size()); ++j) {
    double mx = 0.0;
    for (double v : w.levels[j - 1]) mx = std::max(mx, std::abs(v));
    best = std::max(best, std::pow(2.0, j * (beta + 0.5 * w.r)) * mx);
  }
  return best;
}

std::string to_string(ConditioningMode m) {
  return m == ConditioningMode::BesovCoeffBall ? "besov" : "holder";
}

ConditioningMode conditioning_mode_from_string(const std::string& s) {
  if (s == "besov") return ConditioningMode::BesovCoeffBall;
  if (s == "holder") return ConditioningMode::EmpiricalHolder;
  fail(ErrorKind::Validation, "unknown conditioning mode '" + s + "'");
}

ConditioningCheck in_conditioning_set(const PathFunction& f, const ConditioningSpec& spec) {
  if (f.dim() != spec.r) fail(ErrorKind::Domain, "conditioning spec dimension does not match the path");
  ConditioningCheck c;
  double radius = spec.K;
  const char* what = "Besov norm";
  if (spec.mode == ConditioningMode::BesovCoeffBall) {
    if (!f.is_wavelet()) fail(ErrorKind::Domain, "Besov-ball conditioning needs a wavelet-backed path");
    c.smooth_norm = besov_norm(f.wavelet(), spec.beta);
  } else {
    if (f.is_wavelet()) fail(ErrorKind::Domain, "empirical Hoelder conditioning needs a grid-backed path");
    c.smooth_norm = holder_norm_empirical(f, spec.beta, spec.holder_grid).value;
    radius = spec.K + spec.slack;
    what = "Hoelder norm";
  }
  c.sup_norm = f.sup_norm();
  c.sup_margin = spec.sup_bound - c.sup_norm;
  c.smooth_margin = radius - c.smooth_norm;
  c.inside = c.sup_margin >= 0 && c.smooth_margin >= 0;
  if (c.sup_margin < 0)
    c.message = "sup exceeds " + short_num(spec.sup_bound) + " by " + short_num(-c.sup_margin);
  if (c.smooth_margin < 0) {
    if (!c.message.empty()) c.message += "; ";
    c.message += std::string(what) + " exceeds " + short_num(radius) + " by " + short_num(-c.smooth_margin);
  }
  return c;
}

double layer_sup_distance(const LayerFunction& a, const LayerFunction& b, int grid_m) {
  if (a.active_sets != b.active_sets) fail(ErrorKind::Domain, "layers read different active sets");
  double best = 0.0;
  for (std::size_t j = 0; j < a.paths.size(); ++j) {
    const auto& pa = a.paths[j];
    const auto& pb = b.paths[j];
    GridValues ga, gb;
    const bool lattice =
        (!pa.is_wavelet() && !pb.is_wavelet() && pa.grid().m == pb.grid().m) ||
        (pa.is_wavelet() && pb.is_wavelet() && pa.wavelet().J == pb.wavelet().J);
    if (lattice) {
      // both are piecewise multilinear on one lattice: the node maximum is exact
      ga = pa.as_grid();
      gb = pb.as_grid();
    } else {
      auto eval_a = [&](std::span<const double> u) { return pa.eval(u); };
      auto eval_b = [&](std::span<const double> u) { return pb.eval(u); };
      ga = GridValues::from_function(pa.dim(), grid_m, eval_a);
      gb = GridValues::from_function(pb.dim(), grid_m, eval_b);
    }
    for (std::size_t k = 0; k < ga.values.size(); ++k)
      best = std::max(best, std::abs(ga.values[k] - gb.values[k]));
  }
  return best;
}

GapBound composition_gap_bound(std::span<const LayerFunction> h,
                               std::span<const LayerFunction> h_tilde,
                               std::span<const double> betas, double K,
                               std::span<const double> etas, int grid_m) {
  if (h.size() != h_tilde.size() || h.size() != betas.size() || h.size() != etas.size())
    fail(ErrorKind::Domain, "composition gap needs one beta and one eta per layer");
  if (!(K >= 1.0)) fail(ErrorKind::Domain, "composition gap bound needs K >= 1");
  const auto alpha = alpha_exponents(betas);
  GapBound out;
  double sum = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double gap = layer_sup_distance(h[i], h_tilde[i], grid_m);
    out.layer_gaps.push_back(gap);
    sum += std::pow(etas[i], alpha[i]) + std::pow(gap, alpha[i]);
  }
  out.bound = std::pow(K, static_cast<double>(h.size() - 1)) * sum;
  return out;
}

double measured_gap(std::span<const LayerFunction> h, std::span<const LayerFunction> h_tilde,
                    std::span<const double> points) {
  const auto a = compose(h, points);
  const auto b = compose(h_tilde, points);
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, std::abs(a[i] - b[i]));
  return best;
}

CoveringCount covering_number_oracle(double beta, double K, double delta, int intervals,
                                     std::uint64_t budget) {
  if (!(beta > 0.0 && beta <= 1.0)) fail(ErrorKind::Domain, "covering oracle supports 0 < beta <= 1");
  if (!(K > 0.0) || !(delta > 0.0)) fail(ErrorKind::Domain, "covering oracle needs K > 0 and delta > 0");
  if (intervals <= 0) intervals = std::max(1, static_cast<int>(std::lround(4.0 / delta)));
  const int nodes = intervals + 1;
  const double q = delta / 2.0;
  const int kmax = static_cast<int>(std::floor(1.0 / q + 1e-12));
  std::vector<double> x(nodes);
  for (int a = 0; a < nodes; ++a) x[a] = -1.0 + 2.0 * a / intervals;

  CoveringCount out;
  out.log_bound = entropy_constant_q1(beta, 1, K) * std::pow(delta, -1.0 / beta);

  std::vector<int> k(nodes);
  std::set<std::vector<int>> centers;
  std::vector<std::vector<int>> packing;
  std::vector<int> image(nodes);

  auto visit_leaf = [&] {
    if (++out.class_size > budget)
      fail(ErrorKind::Resource, "covering oracle budget of " + std::to_string(budget) +
                                    " functions exceeded; coarsen the mesh");
    // node-wise rounding to the 2 delta lattice, ties toward zero; with values
    // k q and 2 delta = 4 q this is integer rounding of k / 4
    for (int a = 0; a < nodes; ++a) {
      int c = k[a] / 4;
      const int rem = k[a] % 4;
      if (rem > 2) ++c;
      if (rem < -2) --c;
      image[a] = c;
    }
    centers.insert(image);
    // greedy packing: keep if more than 2 delta from every kept function
    for (const auto& p : packing) {
      int dist = 0;
      for (int a = 0; a < nodes; ++a) dist = std::max(dist, std::abs(p[a] - k[a]));
      if (dist * q <= 2.0 * delta + 1e-12) return;
    }
    packing.push_back(k);
  };

  auto admissible = [&](int depth) {
    for (int b = 0; b < depth; ++b) {
      const double lim = K * std::pow(x[depth] - x[b], beta) + 1e-12;
      if (std::abs(k[depth] - k[b]) * q > lim) return false;
    }
    return true;
  };

  auto dfs = [&](auto&& self, int depth) -> void {
    if (depth == nodes) {
      visit_leaf();
      return;
    }
    for (int v = -kmax; v <= kmax; ++v) {
      k[depth] = v;
      if (admissible(depth)) self(self, depth + 1);
    }
  };
  dfs(dfs, 0);

  out.upper = centers.size();
  out.lower = packing.size();
  return out;
}

json to_json(const WaveletCoeffs& w) {
  return json{{"r", w.r}, {"J", w.J}, {"levels", w.levels}};
}

WaveletCoeffs wavelet_from_json(const json& j, const std::string& pointer) {
  FieldReader rd(j, pointer);
  WaveletCoeffs w;
  w.r = rd.get<int>("r");
  w.J = rd.get<int>("J");
  w.levels = rd.get<std::vector<std::vector<double>>>("levels");
  rd.finish();
  try {
    PathFunction check{w};
  } catch (const Error& e) {
    fail(ErrorKind::Validation, e.what(), rd.at("levels"));
  }
  return w;
}

}  // namespace deepgp
