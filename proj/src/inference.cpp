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

#include "inference.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "format.hpp"
#include "stats.hpp"

namespace deepgp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kMcmcTag = 0x6d636d63;  // "mcmc"

double loglik(std::span<const double> f, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += y[i] * f[i] - 0.5 * f[i] * f[i];
  return s;
}

bool accept(double log_ratio, KeyedRng& rng) {
  if (log_ratio >= 0.0) return true;
  return std::log(rng.uniform()) < log_ratio;
}

void check_design(const Design& design, int d) {
  if (design.uniform) return;
  if (design.weights.empty() || design.points.size() != design.weights.size() * static_cast<std::size_t>(d))
    fail(ErrorKind::Domain, "grid design needs one weight per d-dimensional point");
  double s = 0.0;
  for (double w : design.weights) {
    if (!(w >= 0.0)) fail(ErrorKind::Domain, "design weights must be non-negative");
    s += w;
  }
  if (std::abs(s - 1.0) > 1e-9) fail(ErrorKind::Domain, "design weights must sum to 1");
  for (double p : design.points)
    if (std::abs(p) > 1.0) fail(ErrorKind::Domain, "design points must lie in [-1,1]^d");
}

}  // namespace

RegressionSample generate_data(const Evaluator& f_star, int d, std::size_t n, const Design& design,
                               const KeyedRng& rng, double noise_sd) {
  if (d < 1 || n < 1) fail(ErrorKind::Domain, "data generation needs d >= 1 and n >= 1");
  check_design(design, d);
  RegressionSample s;
  s.d = d;
  s.X.resize(n * d);
  auto xs = rng.child(1);
  if (design.uniform) {
    for (auto& x : s.X) x = 2.0 * xs.uniform() - 1.0;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const double u = xs.uniform();
      double acc = 0.0;
      std::size_t k = 0;
      for (; k + 1 < design.weights.size(); ++k) {
        acc += design.weights[k];
        if (u < acc) break;
      }
      std::copy_n(design.points.begin() + static_cast<std::ptrdiff_t>(k * d), d,
                  s.X.begin() + static_cast<std::ptrdiff_t>(i * d));
    }
  }
  s.truth = f_star(s.X);
  if (s.truth.size() != n) fail(ErrorKind::Domain, "truth evaluator returned the wrong number of values");
  for (std::size_t i = 0; i < n; ++i)
    if (!(std::abs(s.truth[i]) <= 1.0 + 1e-12))
      fail(ErrorKind::Domain, "regression function leaves [-1,1] at design point " + std::to_string(i) +
                                  " (value " + format_real(s.truth[i]) + ")");
  auto es = rng.child(2);
  s.Y.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.Y[i] = s.truth[i] + noise_sd * es.normal();
  return s;
}

double log_likelihood_ratio(std::span<const double> f, std::span<const double> g,
                            std::span<const double> y) {
  if (f.size() != g.size() || f.size() != y.size())
    fail(ErrorKind::Domain, "likelihood ratio needs matching sample sizes");
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    s += y[i] * (f[i] - g[i]) - 0.5 * f[i] * f[i] + 0.5 * g[i] * g[i];
  return s;
}

InfoGeometry kl_v2_hellinger(std::span<const double> f, std::span<const double> g,
                             std::span<const double> weights) {
  if (f.size() != g.size() || f.size() != weights.size())
    fail(ErrorKind::Domain, "information functionals need matching lengths");
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (std::abs(wsum - 1.0) > 1e-9) fail(ErrorKind::Domain, "quadrature weights must sum to 1");
  InfoGeometry out;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d2 = (f[i] - g[i]) * (f[i] - g[i]);
    out.kl += weights[i] * d2;
    out.v2_upper += weights[i] * (d2 + 0.25 * d2 * d2);
    // sum w (1 - e^{-d2/8}) rather than 1 - sum w e^{-d2/8}: no cancellation
    out.hellinger -= weights[i] * std::expm1(-d2 / 8.0);
  }
  return out;
}

Quadrature holdout_quadrature(int d, const Design& design, std::size_t max_points) {
  if (d < 1) fail(ErrorKind::Domain, "quadrature needs d >= 1");
  Quadrature q;
  q.d = d;
  if (!design.uniform) {
    check_design(design, d);
    q.points = design.points;
    q.weights = design.weights;
    return q;
  }
  int m = std::max(2, static_cast<int>(std::floor(std::pow(double(max_points), 1.0 / d) + 1e-9)));
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(m);
  q.points.resize(total * d);
  q.weights.assign(total, 1.0 / static_cast<double>(total));
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (int a = d - 1; a >= 0; --a) {
      q.points[idx * d + a] = -1.0 + (2.0 * static_cast<double>(rest % m) + 1.0) / m;
      rest /= m;
    }
  }
  return q;
}

json to_json(const PosteriorConfig& c) {
  return json{{"chains", c.chains},
              {"iterations", c.iterations},
              {"pcn_rho", c.pcn_rho},
              {"structure_move_prob", c.structure_move_prob},
              {"burn_in", c.burn_in},
              {"adapt", c.adapt},
              {"likelihood", c.likelihood}};
}

PosteriorConfig posterior_config_from_json(const json& j, const std::string& pointer) {
  FieldReader r(j, pointer);
  PosteriorConfig c;
  c.chains = r.get_or("chains", c.chains);
  c.iterations = r.get_or("iterations", c.iterations);
  c.pcn_rho = r.get_or("pcn_rho", c.pcn_rho);
  c.structure_move_prob = r.get_or("structure_move_prob", c.structure_move_prob);
  c.burn_in = r.get_or("burn_in", c.burn_in);
  c.adapt = r.get_or("adapt", c.adapt);
  c.likelihood = r.get_or("likelihood", c.likelihood);
  r.finish();
  require(c.chains >= 1, "chains must be >= 1", r.at("chains"));
  require(c.iterations >= 1, "iterations must be >= 1", r.at("iterations"));
  require(c.pcn_rho > 0.0 && c.pcn_rho < 1.0, "pcn_rho must lie in (0, 1)", r.at("pcn_rho"));
  require(c.structure_move_prob >= 0.0 && c.structure_move_prob <= 1.0,
          "structure_move_prob must lie in [0, 1]", r.at("structure_move_prob"));
  require(c.burn_in >= 0.0 && c.burn_in < 1.0, "burn_in must lie in [0, 1)", r.at("burn_in"));
  return c;
}

namespace {

struct ChainResult {
  std::vector<TraceRow> rows;
  ChainSummary summary;
};

ChainResult run_chain(int chain, const RegressionSample& data, const PriorWeights& weights,
                      const StructurePriorSpec& spec, const PosteriorConfig& cfg, const Truth* truth,
                      const Quadrature& quad, const std::vector<double>& truth_quad) {
  const KeyedRng chain_rng(cfg.seed, {kMcmcTag, static_cast<std::uint64_t>(chain)});
  const bool use_lik = cfg.likelihood;
  const double ll_truth = truth && use_lik ? loglik(data.truth, data.Y) : kNaN;

  auto init = sample_prior(weights, spec, chain_rng.child(0));
  std::size_t sid = init.structure_index;
  DgpDraw state = std::move(init.draw);
  std::vector<double> fx = use_lik ? state.eval(data.X) : std::vector<double>{};
  double ll = use_lik ? loglik(fx, data.Y) : 0.0;

  double rho = cfg.pcn_rho;
  const int burn = static_cast<int>(cfg.burn_in * cfg.iterations);
  long pcn_acc = 0, pcn_prop = 0, st_acc = 0, st_prop = 0;
  int win_acc = 0, win_prop = 0;

  ChainResult res;
  res.rows.reserve(static_cast<std::size_t>(cfg.iterations));
  for (int it = 0; it < cfg.iterations; ++it) {
    auto rng = chain_rng.child(static_cast<std::uint64_t>(it) + 1);
    TraceRow row;
    row.chain = chain;
    row.iteration = it;
    if (rng.uniform() < cfg.structure_move_prob) {
      // independence proposal from the prior: all prior terms cancel
      row.structure_proposed = true;
      ++st_prop;
      auto prop = sample_prior(weights, spec, rng.child(1));
      std::vector<double> fx_new = use_lik ? prop.draw.eval(data.X) : std::vector<double>{};
      const double ll_new = use_lik ? loglik(fx_new, data.Y) : 0.0;
      if (accept(ll_new - ll, rng)) {
        sid = prop.structure_index;
        state = std::move(prop.draw);
        fx = std::move(fx_new);
        ll = ll_new;
        row.structure_accepted = true;
        ++st_acc;
      }
    } else {
      const double step = std::sqrt(1.0 - rho * rho);
      for (std::size_t k = 0; k < state.nodes.size(); ++k) {
        auto& node = state.nodes[k];
        const auto fam = GaussianFamily::get(node.gp);
        auto stream = rng.child(100 + k);
        const auto w = fam->draw_latent(stream);
        std::vector<double> xi(node.latent.size());
        for (std::size_t a = 0; a < xi.size(); ++a) xi[a] = rho * node.latent[a] + step * w[a];
        auto path = fam->map(xi);
        ++row.pcn_proposed;
        // leaving the conditioning set has zero prior mass: reject outright
        if (!in_conditioning_set(path, node.conditioning).inside) continue;
        std::swap(state.path(node), path);
        bool ok = true;
        std::vector<double> fx_new;
        double ll_new = 0.0;
        if (use_lik) {
          fx_new = state.eval(data.X);
          ll_new = loglik(fx_new, data.Y);
          ok = accept(ll_new - ll, stream);
        }
        if (ok) {
          node.latent = std::move(xi);
          if (use_lik) {
            fx = std::move(fx_new);
            ll = ll_new;
          }
          ++row.pcn_accepted;
        } else {
          std::swap(state.path(node), path);
        }
      }
      pcn_acc += row.pcn_accepted;
      pcn_prop += row.pcn_proposed;
      win_acc += row.pcn_accepted;
      win_prop += row.pcn_proposed;
    }

    if (cfg.adapt && it < burn && (it + 1) % 50 == 0 && win_prop > 0) {
      const double rate = static_cast<double>(win_acc) / win_prop;
      double s = std::sqrt(1.0 - rho * rho);
      if (rate > 0.3) s = std::min(1.0, s * 1.5);
      if (rate < 0.2) s = std::max(1e-4, s / 1.5);
      rho = std::sqrt(std::max(0.0, 1.0 - s * s));
      rho = std::min(rho, 1.0 - 1e-12);
      win_acc = win_prop = 0;
    }

    row.structure_id = sid;
    row.loglik = use_lik ? ll : kNaN;
    row.llr = ll - ll_truth;
    if (truth) {
      const auto vals = state.eval(quad.points);
      double e = 0.0;
      for (std::size_t i = 0; i < vals.size(); ++i)
        e += quad.weights[i] * (vals[i] - truth_quad[i]) * (vals[i] - truth_quad[i]);
      row.l2_error = std::sqrt(e);
    } else {
      row.l2_error = kNaN;
    }
    const auto& n0 = state.nodes.front();
    const auto chk = in_conditioning_set(state.path(n0), n0.conditioning);
    row.norm0 = chk.smooth_norm;
    row.sup0 = chk.sup_norm;
    res.rows.push_back(row);
  }

  if (pcn_acc == 0 && st_acc == 0)
    fail(ErrorKind::Numeric, "mixing failure in chain " + std::to_string(chain) + ": no move accepted in " +
                                 std::to_string(cfg.iterations) + " iterations (" + std::to_string(pcn_prop) +
                                 " pCN and " + std::to_string(st_prop) + " structure proposals)");
  res.summary.pcn_acceptance = pcn_prop ? static_cast<double>(pcn_acc) / pcn_prop : 0.0;
  res.summary.structure_acceptance = st_prop ? static_cast<double>(st_acc) / st_prop : 0.0;
  res.summary.structure_proposals = static_cast<int>(st_prop);
  res.summary.final_rho = rho;
  return res;
}

}  // namespace

PosteriorTrace run_mcmc(const RegressionSample& data, const PriorWeights& weights,
                        const StructurePriorSpec& spec, const PosteriorConfig& config,
                        const Truth* truth, const Design& design) {
  if (config.chains < 1 || config.iterations < 1) fail(ErrorKind::Domain, "need at least one chain and iteration");
  if (data.X.size() != data.size() * static_cast<std::size_t>(data.d))
    fail(ErrorKind::Domain, "regression sample has inconsistent X and Y");
  for (const auto& e : weights.entries)
    if (e.weight > 0 && e.structure.graph.input_dim() != data.d)
      fail(ErrorKind::Domain, "prior structure " + structure_label(e.structure) + " expects d_0 = " +
                                  std::to_string(e.structure.graph.input_dim()) + " but data has d = " +
                                  std::to_string(data.d));

  Quadrature quad;
  std::vector<double> truth_quad;
  if (truth) {
    quad = holdout_quadrature(data.d, design);
    truth_quad = truth->f(quad.points);
  }

  std::vector<ChainResult> results(static_cast<std::size_t>(config.chains));
  std::vector<std::exception_ptr> errors(results.size());
  auto work = [&](std::size_t c) {
    try {
      results[c] = run_chain(static_cast<int>(c), data, weights, spec, config, truth, quad, truth_quad);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, config.threads));
  for (std::size_t start = 0; start < results.size(); start += threads) {
    std::vector<std::thread> pool;
    const std::size_t stop = std::min(results.size(), start + threads);
    if (threads == 1) {
      work(start);
    } else {
      for (std::size_t c = start; c < stop; ++c) pool.emplace_back(work, c);
      for (auto& t : pool) t.join();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  PosteriorTrace trace;
  trace.iterations = config.iterations;
  trace.burn_in = config.burn_in;
  for (const auto& e : weights.entries) trace.structure_labels.push_back(structure_label(e.structure));
  for (auto& r : results) {
    trace.rows.insert(trace.rows.end(), r.rows.begin(), r.rows.end());
    trace.chains.push_back(r.summary);
  }
  return trace;
}

ModelMass model_mass(const PosteriorTrace& trace, const PriorWeights& weights,
                     const StructurePriorSpec& spec, const CompositionStructure& eta_star, double C,
                     bool node_cap) {
  if (!(C >= 1.0)) fail(ErrorKind::Domain, "model mass needs C >= 1");
  const double eps_star = eps_structure(eta_star, spec.profile, spec.n);
  const double cap = std::log(2.0 * std::log(spec.n));
  std::vector<char> good(weights.entries.size());
  for (std::size_t i = 0; i < good.size(); ++i) {
    const auto& eta = weights.entries[i].structure;
    bool in = eps_structure(eta, spec.profile, spec.n) <= C * eps_star;
    if (node_cap) in = in && eta.graph.node_count() <= cap;
    good[i] = in;
  }
  ModelMass out;
  std::size_t kept = 0, hit = 0;
  for (const auto& row : trace.rows) {
    if (!trace.kept(row)) continue;
    ++kept;
    if (good.at(row.structure_id)) ++hit;
  }
  if (kept == 0) fail(ErrorKind::Domain, "trace has no post-burn-in draws");
  out.mass = static_cast<double>(hit) / kept;
  if (!node_cap)
    out.warning = "node cap |d|_1 <= log(2 log n) = " + format_short(cap) +
                  " disabled: it is an asymptotic condition that at this n admits only |d|_1 <= " +
                  std::to_string(static_cast<int>(std::floor(cap)));
  return out;
}

double structure_mass(const PosteriorTrace& trace, std::size_t structure_id) {
  std::size_t kept = 0, hit = 0;
  for (const auto& row : trace.rows) {
    if (!trace.kept(row)) continue;
    ++kept;
    if (row.structure_id == structure_id) ++hit;
  }
  if (kept == 0) fail(ErrorKind::Domain, "trace has no post-burn-in draws");
  return static_cast<double>(hit) / kept;
}

SeedRun run_seed(const Truth& truth, int d, const StructurePriorSpec& spec, const PriorWeights& weights,
                 const PosteriorConfig& config, std::uint64_t seed, double noise_sd) {
  const auto n = static_cast<std::uint64_t>(spec.n);
  const auto data = generate_data(truth.f, d, n, Design{}, KeyedRng(seed, {0x64617461, n}), noise_sd);
  auto cfg = config;
  cfg.seed = KeyedRng(seed, {kMcmcTag, n}).key();
  SeedRun out{run_mcmc(data, weights, spec, cfg, &truth), 0.0};
  std::vector<double> errs;
  for (const auto& r : out.trace.rows)
    if (out.trace.kept(r)) errs.push_back(r.l2_error);
  out.median_error = median(errs);
  return out;
}

ContractionRow contraction_point(const Truth& truth, int d, StructurePriorSpec spec,
                                 const PosteriorConfig& config, double n,
                                 std::span<const std::uint64_t> seeds) {
  if (!truth.structure) fail(ErrorKind::Domain, "contraction curve needs the true structure");
  if (seeds.empty()) fail(ErrorKind::Domain, "contraction curve needs at least one seed");
  spec.n = n;
  const auto weights = structure_prior_weights(spec);
  ContractionRow row;
  row.n = n;
  for (auto seed : seeds) row.per_seed.push_back(run_seed(truth, d, spec, weights, config, seed).median_error);
  row.median_error = median(row.per_seed);
  row.eps_n = eps_structure(*truth.structure, spec.profile, n);
  row.minimax = minimax_rate(*truth.structure, n).rate;
  row.eps_log_inflated = row.eps_n * std::pow(std::log(n), 1.0 + std::log(spec.profile.holder_radius));
  return row;
}

std::vector<ContractionRow> contraction_curve(const Truth& truth, int d, const StructurePriorSpec& spec,
                                              const PosteriorConfig& config,
                                              std::span<const double> n_list,
                                              std::span<const std::uint64_t> seeds) {
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (!(n_list[i] > n_list[i - 1])) fail(ErrorKind::Domain, "n_list must be increasing");
  std::vector<ContractionRow> out;
  for (double n : n_list) out.push_back(contraction_point(truth, d, spec, config, n, seeds));
  return out;
}

}  // namespace deepgp
