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

#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "format.hpp"
#include "io.hpp"
#include "stats.hpp"

namespace deepgp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::uint64_t kDataTag = 0x64617461;  // same key as run_seed

struct Globals {
  std::uint64_t seed = 0;
  int threads = 1;
};

// Reads the fields every command shares and leaves the rest to the caller.
Globals read_globals(FieldReader& r, const RunOptions& opt) {
  const auto version = r.get<int>("schema_version");
  require(version == 1, "unsupported schema_version " + std::to_string(version) + " (expected 1)",
          r.at("schema_version"));
  Globals g;
  g.seed = r.get_or<std::uint64_t>("seed", 0);
  g.threads = r.get_or("threads", 1);
  if (r.has("out")) r.get<std::string>("out");
  if (opt.seed) g.seed = *opt.seed;
  if (opt.threads) g.threads = *opt.threads;
  require(g.threads >= 1, "threads must be >= 1", r.at("threads"));
  return g;
}

int prior_input_dim(const StructurePriorSpec& spec, const std::string& pointer) {
  if (!spec.structures) return spec.space.input_dim;
  const int d = spec.structures->front().graph.input_dim();
  for (const auto& eta : *spec.structures)
    require(eta.graph.input_dim() == d, "all listed structures must share the input dimension",
            pointer + "/structures");
  return d;
}

std::vector<double> real_list(FieldReader& r, const std::string& key, std::vector<double> fallback) {
  auto v = r.get_or(key, fallback);
  require(!v.empty(), key + " must not be empty", r.at(key));
  return v;
}

// ---------------------------------------------------------------- truth

struct TruthSpec {
  Truth truth;
  std::string kind;
};

TruthSpec truth_from_json(const json& j, const std::string& ptr, const StructurePriorSpec& prior, int d,
                          std::uint64_t seed) {
  FieldReader r(j, ptr);
  TruthSpec out;
  out.kind = r.get<std::string>("kind");
  if (r.has("structure")) {
    auto eta = structure_from_json(r.raw("structure"), r.at("structure"));
    // compare like with like: eps_n depends on the beta bounds
    if (!r.raw("structure").contains("beta_bounds")) eta.bounds = prior.space.bounds;
    auto rep = validate_structure(eta);
    if (!rep.ok) fail(ErrorKind::Validation, "invalid truth structure: " + rep.violations.front(), r.at("structure"));
    require(eta.graph.input_dim() == d, "truth structure input dimension differs from the prior's",
            r.at("structure"));
    out.truth.structure = std::move(eta);
  }
  if (out.kind == "sine") {
    const double amp = r.get_or("amplitude", 0.5);
    const double freq = r.get_or("frequency", 2.0);
    const double phase = r.get_or("phase", 0.0);
    const int coord = r.get_or("coordinate", 1);
    require(std::abs(amp) <= 1.0, "amplitude must lie in [-1, 1]", r.at("amplitude"));
    require(coord >= 1 && coord <= d, "coordinate must lie in 1..d", r.at("coordinate"));
    out.truth.f = [=](std::span<const double> x) {
      std::vector<double> y(x.size() / d);
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = amp * std::sin(freq * x[i * d + coord - 1] + phase);
      return y;
    };
  } else if (out.kind == "constant" || out.kind == "zero") {
    const double c = out.kind == "zero" ? 0.0 : r.get<double>("value");
    require(std::abs(c) <= 1.0, "value must lie in [-1, 1]", r.at("value"));
    out.truth.f = [=](std::span<const double> x) { return std::vector<double>(x.size() / d, c); };
  } else if (out.kind == "dgp") {
    require(out.truth.structure.has_value(), "a dgp truth needs a structure", r.at("structure"));
    const auto tseed = r.get_or<std::uint64_t>("seed", seed);
    auto spec = prior;
    auto draw = std::make_shared<DgpDraw>(sample_dgp(*out.truth.structure, spec, KeyedRng(tseed, {0x7472757468})));
    out.truth.f = [draw](std::span<const double> x) { return draw->eval(x); };
  } else {
    fail(ErrorKind::Validation, "unknown truth kind '" + out.kind + "' (sine, constant, zero, dgp)", r.at("kind"));
  }
  r.finish();
  return out;
}

// ---------------------------------------------------------------- rates

RunResult cmd_rates(FieldReader& r, const Globals& g) {
  auto eta = structure_from_json(r.raw("structure"), r.at("structure"));
  auto rep = validate_structure(eta);
  if (!rep.ok) fail(ErrorKind::Validation, "invalid structure: " + rep.violations.front(), r.at("structure"));
  RateProfile profile;
  if (r.has("profile")) profile = profile_from_json(r.raw("profile"), r.at("profile"));
  if (r.has("family")) profile.family = family_from_string(r.get<std::string>("family"));
  const auto ns = real_list(r, "n", {1e3, 1e4, 1e5, 1e6});
  for (double n : ns) require(n >= 3, "every n must be >= 3", r.at("n"));
  r.finish();

  CsvWriter csv({"n", "r_n", "eps_n", "log_prior_weight", "argmax_layer"});
  for (double n : ns) {
    const auto mm = minimax_rate(eta, n);
    std::string arg;
    for (std::size_t k = 0; k < mm.argmax.size(); ++k) arg += (k ? ";" : "") + std::to_string(mm.argmax[k]);
    csv.field(n).field(mm.rate).field(eps_structure(eta, profile, n))
        .field(psi_log_weight(eta, profile, n).log_value).field(arg);
    csv.end_row();
  }
  RunResult out;
  out.seed = g.seed;
  out.artifacts.push_back({"rates.csv", csv.str()});
  return out;
}

// ---------------------------------------------------------------- sample

RunResult cmd_sample(FieldReader& r, const Globals& g) {
  RateProfile profile;
  if (r.has("profile")) profile = profile_from_json(r.raw("profile"), r.at("profile"));
  GpSpec spec;
  spec.family = family_from_string(r.get<std::string>("family"));
  profile.family = spec.family;
  spec.beta = r.get<double>("beta");
  spec.r = r.get_or("r", 1);
  spec.n = r.get_or("n", 1000.0);
  spec.grid = r.get_or("grid", 0);
  const int count = r.get_or("count", 100);
  const int max_attempts = r.get_or("max_attempts", 10000);
  require(count >= 1, "count must be >= 1", r.at("count"));
  require(max_attempts >= 1, "max_attempts must be >= 1", r.at("max_attempts"));
  require(spec.n >= 3, "n must be >= 3", r.at("n"));
  try {
    validate_gp_spec(spec);
  } catch (const Error& e) {
    fail(ErrorKind::Validation, e.what(), r.where());
  }

  bool conditioned = true;
  ConditioningSpec cond = layer_conditioning(profile, spec.beta, spec.r,
                                             2.0 * eps_alpha(profile, 1.0, spec.beta, spec.r, spec.n));
  if (r.has("conditioning")) {
    FieldReader c(r.raw("conditioning"), r.at("conditioning"));
    const auto mode = c.get_or<std::string>("mode", to_string(cond.mode));
    if (mode == "none") {
      conditioned = false;
    } else {
      cond.mode = conditioning_mode_from_string(mode);
      cond.K = c.get_or("K", cond.K);
      cond.slack = c.get_or("slack", cond.slack);
      cond.sup_bound = c.get_or("sup_bound", cond.sup_bound);
      cond.holder_grid = c.get_or("holder_grid", cond.holder_grid);
      require(cond.K > 0, "K must be positive", c.at("K"));
      require(cond.slack >= 0, "slack must be >= 0", c.at("slack"));
      require(cond.sup_bound >= 0, "sup_bound must be >= 0", c.at("sup_bound"));
      require(cond.mode == ConditioningMode::EmpiricalHolder || spec.family == Family::TruncatedWavelet,
              "besov conditioning needs the wavelet family", c.at("mode"));
    }
    c.finish();
  }
  r.finish();

  const auto family = GaussianFamily::get(spec);
  const bool wavelet = spec.family == Family::TruncatedWavelet;
  CsvWriter rows({"index", "attempts", "accepted", "sup_norm", "besov_norm", "holder_norm", "holder_coarse"});
  json paths = json::array();
  Tensor grid;
  long long total_attempts = 0;
  int accepted = 0;
  for (int i = 0; i < count; ++i) {
    const KeyedRng rng(g.seed, {0x736d706c, static_cast<std::uint64_t>(i)});
    PathFunction path;
    int attempts = 1;
    bool ok = true;
    if (conditioned) {
      auto s = sample_conditioned(*family, cond, max_attempts, rng);
      path = std::move(s.path);
      attempts = s.stats.attempts;
      ok = s.stats.accepted;
    } else {
      auto stream = rng.child(0);
      path = family->sample(stream);
    }
    total_attempts += attempts;
    accepted += ok ? 1 : 0;
    const auto h = holder_norm_empirical(path, spec.beta, cond.holder_grid);
    rows.field(i).field(attempts).field(ok ? 1 : 0).field(path.sup_norm())
        .field(wavelet ? besov_norm(path.wavelet(), spec.beta) : kNaN).field(h.value).field(h.coarse_grid ? 1 : 0);
    rows.end_row();
    if (wavelet) {
      paths.push_back(json{{"index", i}, {"coeffs", to_json(path.wavelet())}});
    } else {
      const auto& gv = path.grid();
      grid.data.insert(grid.data.end(), gv.values.begin(), gv.values.end());
      grid.meta = json{{"family", to_string(spec.family)}, {"r", gv.r}, {"m", gv.m}, {"beta", spec.beta}};
      grid.shape = {static_cast<std::uint64_t>(i + 1), static_cast<std::uint64_t>(gv.values.size())};
    }
  }

  CsvWriter stats({"draws", "total_attempts", "acceptance_rate", "mode", "radius", "slack", "sup_bound",
                   "acceptance_lower_bound"});
  double bound = kNaN;
  if (conditioned && wavelet) {
    // the radius is (1 + K') sqrt(2 log 2); invert it for the matching bound
    const double kp = cond.K / std::sqrt(2.0 * std::log(2.0)) - 1.0;
    if (kp > std::sqrt(3.0)) bound = acceptance_lower_bound(kp, spec.r);
  }
  stats.field(count).field(total_attempts).field(static_cast<double>(count) / static_cast<double>(total_attempts))
      .field(conditioned ? to_string(cond.mode) : std::string("none"))
      .field(conditioned ? cond.K : kNaN).field(conditioned ? cond.slack : kNaN)
      .field(conditioned ? cond.sup_bound : kNaN).field(bound);
  stats.end_row();

  RunResult out;
  out.seed = g.seed;
  out.artifacts.push_back({"samples.csv", rows.str()});
  out.artifacts.push_back({"stats.csv", stats.str()});
  if (wavelet)
    out.artifacts.push_back({"paths.json", paths.dump(1) + "\n"});
  else
    out.artifacts.push_back({"paths.dgpt", encode_tensor(grid)});
  if (accepted < count)
    out.warnings.push_back(std::to_string(count - accepted) + " draws were unconditioned fallbacks");
  return out;
}

// ---------------------------------------------------------------- prior

std::string weights_csv(const PriorWeights& w) {
  CsvWriter csv({"structure_id", "label", "q", "node_count", "log_gamma", "log_penalty", "log_weight", "weight"});
  for (std::size_t i = 0; i < w.entries.size(); ++i) {
    const auto& e = w.entries[i];
    csv.field(i).field(structure_label(e.structure)).field(e.structure.q())
        .field(e.structure.graph.node_count()).field(e.log_gamma).field(e.log_penalty.log_value)
        .field(e.log_weight.log_value).field(e.weight);
    csv.end_row();
  }
  return csv.str();
}

RunResult cmd_prior(FieldReader& r, const Globals& g) {
  const auto spec = prior_spec_from_json(r.raw("prior"), r.at("prior"));
  const int d = prior_input_dim(spec, r.at("prior"));
  const int draws = r.get_or("draws", 10);
  const int eval_points = r.get_or("eval_points", 256);
  require(draws >= 0, "draws must be >= 0", r.at("draws"));
  require(eval_points >= 2, "eval_points must be >= 2", r.at("eval_points"));
  r.finish();

  const auto weights = structure_prior_weights(spec);
  const auto quad = holdout_quadrature(d, Design{}, static_cast<std::size_t>(eval_points));
  const std::size_t npts = quad.weights.size();

  std::vector<std::string> header{"draw", "structure_id", "label", "total_attempts"};
  CsvWriter draws_csv(header);
  std::vector<std::string> vheader{"draw", "point"};
  for (int a = 1; a <= d; ++a) vheader.push_back("x" + std::to_string(a));
  vheader.push_back("f");
  CsvWriter values(vheader);
  Tensor tensor;
  tensor.shape = {static_cast<std::uint64_t>(draws), npts};
  tensor.meta = json{{"d", d}, {"points", quad.points}};
  for (int k = 0; k < draws; ++k) {
    const auto pd = sample_prior(weights, spec, KeyedRng(g.seed, {0x7072696f72, static_cast<std::uint64_t>(k)}));
    long long attempts = 0;
    for (const auto& node : pd.draw.nodes) attempts += node.stats.attempts;
    draws_csv.field(k).field(pd.structure_index).field(structure_label(pd.draw.structure)).field(attempts);
    draws_csv.end_row();
    const auto f = pd.draw.eval(quad.points);
    for (std::size_t p = 0; p < npts; ++p) {
      values.field(k).field(p);
      for (int a = 0; a < d; ++a) values.field(quad.points[p * d + a]);
      values.field(f[p]);
      values.end_row();
    }
    tensor.data.insert(tensor.data.end(), f.begin(), f.end());
  }
  RunResult out;
  out.seed = g.seed;
  out.artifacts.push_back({"weights.csv", weights_csv(weights)});
  out.artifacts.push_back({"draws.csv", draws_csv.str()});
  out.artifacts.push_back({"draw_values.csv", values.str()});
  out.artifacts.push_back({"draw_values.dgpt", encode_tensor(tensor)});
  if (!weights.note.empty()) out.warnings.push_back(weights.note);
  return out;
}

// ---------------------------------------------------------------- fit

const std::vector<std::string> kTraceColumns{"chain", "iteration", "structure_id", "loglik", "llr", "l2_error",
                                             "norm0", "sup0", "pcn_accepted", "pcn_proposed",
                                             "structure_proposed", "structure_accepted"};

std::vector<double> trace_values(const TraceRow& t) {
  return {double(t.chain), double(t.iteration), double(t.structure_id), t.loglik, t.llr, t.l2_error,
          t.norm0, t.sup0, double(t.pcn_accepted), double(t.pcn_proposed),
          t.structure_proposed ? 1.0 : 0.0, t.structure_accepted ? 1.0 : 0.0};
}

std::string trace_csv(const PosteriorTrace& trace) {
  CsvWriter csv(kTraceColumns);
  for (const auto& t : trace.rows) {
    csv.field(t.chain).field(t.iteration).field(t.structure_id).field(t.loglik).field(t.llr).field(t.l2_error)
        .field(t.norm0).field(t.sup0).field(t.pcn_accepted).field(t.pcn_proposed)
        .field(t.structure_proposed ? 1 : 0).field(t.structure_accepted ? 1 : 0);
    csv.end_row();
  }
  return csv.str();
}

Tensor trace_tensor(const PosteriorTrace& trace, double n) {
  Tensor t;
  t.shape = {trace.rows.size(), kTraceColumns.size()};
  for (const auto& row : trace.rows) {
    const auto v = trace_values(row);
    t.data.insert(t.data.end(), v.begin(), v.end());
  }
  t.meta = json{{"columns", kTraceColumns}, {"structure_labels", trace.structure_labels},
                {"iterations", trace.iterations}, {"burn_in", trace.burn_in}, {"n", n},
                {"chains", trace.chains.size()}};
  return t;
}

PosteriorTrace trace_from_tensor(const Tensor& t) {
  const auto& m = t.meta;
  require(m.contains("columns") && m["columns"].get<std::vector<std::string>>() == kTraceColumns,
          "trace tensor has unexpected columns");
  require(t.shape.size() == 2 && t.shape[1] == kTraceColumns.size(), "trace tensor has the wrong shape");
  PosteriorTrace trace;
  trace.iterations = m.at("iterations").get<int>();
  trace.burn_in = m.at("burn_in").get<double>();
  trace.structure_labels = m.at("structure_labels").get<std::vector<std::string>>();
  for (std::uint64_t i = 0; i < t.shape[0]; ++i) {
    const double* v = t.data.data() + i * kTraceColumns.size();
    TraceRow row;
    row.chain = static_cast<int>(v[0]);
    row.iteration = static_cast<int>(v[1]);
    row.structure_id = static_cast<std::size_t>(v[2]);
    row.loglik = v[3];
    row.llr = v[4];
    row.l2_error = v[5];
    row.norm0 = v[6];
    row.sup0 = v[7];
    row.pcn_accepted = static_cast<int>(v[8]);
    row.pcn_proposed = static_cast<int>(v[9]);
    row.structure_proposed = v[10] != 0.0;
    row.structure_accepted = v[11] != 0.0;
    trace.rows.push_back(row);
  }
  return trace;
}

std::string summary_csv(const PosteriorTrace& trace) {
  CsvWriter csv({"chain", "pcn_acceptance", "structure_acceptance", "structure_proposals", "final_rho",
                 "kept_draws", "mean_loglik", "median_l2_error"});
  for (std::size_t c = 0; c < trace.chains.size(); ++c) {
    std::vector<double> ll, err;
    for (const auto& row : trace.rows)
      if (row.chain == static_cast<int>(c) && trace.kept(row)) {
        ll.push_back(row.loglik);
        err.push_back(row.l2_error);
      }
    const auto& s = trace.chains[c];
    csv.field(c).field(s.pcn_acceptance).field(s.structure_acceptance).field(s.structure_proposals)
        .field(s.final_rho).field(ll.size()).field(ll.empty() ? kNaN : mean(ll))
        .field(err.empty() ? kNaN : median(err));
    csv.end_row();
  }
  return csv.str();
}

std::string structures_csv(const PosteriorTrace& trace, const PriorWeights& w) {
  CsvWriter csv({"structure_id", "label", "prior_weight", "posterior_mass"});
  for (std::size_t i = 0; i < w.entries.size(); ++i) {
    csv.field(i).field(structure_label(w.entries[i].structure)).field(w.entries[i].weight)
        .field(structure_mass(trace, i));
    csv.end_row();
  }
  return csv.str();
}

RegressionSample data_from_csv(const std::string& path, int d, const std::string& ptr) {
  const auto table = parse_csv(read_file(path));
  RegressionSample s;
  s.d = d;
  std::vector<std::size_t> xcol;
  for (int a = 1; a <= d; ++a) xcol.push_back(table.column("x" + std::to_string(a)));
  const auto ycol = table.column("y");
  require(!table.rows.empty(), "data CSV has no rows", ptr);
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (auto c : xcol) {
      double v = 0.0;
      try {
        v = std::stod(table.rows[i][c]);
      } catch (const std::exception&) {
        fail(ErrorKind::Validation, "non-numeric value in data row " + std::to_string(i + 1), ptr);
      }
      require(std::abs(v) <= 1.0, "data row " + std::to_string(i + 1) + " has x outside [-1,1]", ptr);
      s.X.push_back(v);
    }
    try {
      s.Y.push_back(std::stod(table.rows[i][ycol]));
    } catch (const std::exception&) {
      fail(ErrorKind::Validation, "non-numeric y in data row " + std::to_string(i + 1), ptr);
    }
  }
  return s;
}

std::string data_csv(const RegressionSample& s) {
  std::vector<std::string> header;
  for (int a = 1; a <= s.d; ++a) header.push_back("x" + std::to_string(a));
  header.push_back("y");
  header.push_back("f");
  CsvWriter csv(header);
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (int a = 0; a < s.d; ++a) csv.field(s.X[i * s.d + a]);
    csv.field(s.Y[i]).field(s.truth.empty() ? kNaN : s.truth[i]);
    csv.end_row();
  }
  return csv.str();
}

PosteriorConfig read_mcmc(FieldReader& r, const Globals& g) {
  PosteriorConfig cfg;
  if (r.has("mcmc")) cfg = posterior_config_from_json(r.raw("mcmc"), r.at("mcmc"));
  cfg.threads = g.threads;
  return cfg;
}

RunResult cmd_fit(FieldReader& r, const Globals& g) {
  auto spec = prior_spec_from_json(r.raw("prior"), r.at("prior"));
  const int d = prior_input_dim(spec, r.at("prior"));
  auto cfg = read_mcmc(r, g);

  RegressionSample data;
  double noise_sd = 1.0;
  std::optional<std::string> csv_path;
  std::size_t n = 0;
  {
    FieldReader dr(r.raw("data"), r.at("data"));
    if (dr.has("csv")) {
      csv_path = dr.get<std::string>("csv");
    } else {
      n = dr.get<std::size_t>("n");
      noise_sd = dr.get_or("noise_sd", 1.0);
      require(n >= 3, "n must be >= 3", dr.at("n"));
      require(noise_sd >= 0, "noise_sd must be >= 0", dr.at("noise_sd"));
    }
    dr.finish();
  }
  std::optional<TruthSpec> truth;
  if (r.has("truth")) truth = truth_from_json(r.raw("truth"), r.at("truth"), spec, d, g.seed);
  require(csv_path || truth, "synthetic data needs a truth", r.at("truth"));
  r.finish();

  if (csv_path) {
    data = data_from_csv(*csv_path, d, "/data/csv");
    n = data.size();
    require(n >= 3, "data CSV needs at least 3 rows", "/data/csv");
    if (truth) data.truth = truth->truth.f(data.X);
  } else {
    data = generate_data(truth->truth.f, d, n, Design{}, KeyedRng(g.seed, {kDataTag, n}), noise_sd);
  }
  // the structure penalty is evaluated at the actual sample size
  spec.n = static_cast<double>(n);
  const auto weights = structure_prior_weights(spec);
  cfg.seed = KeyedRng(g.seed, {0x6669745f6d636d63, n}).key();
  const auto trace = run_mcmc(data, weights, spec, cfg, truth ? &truth->truth : nullptr);

  RunResult out;
  out.seed = g.seed;
  out.artifacts.push_back({"data.csv", data_csv(data)});
  out.artifacts.push_back({"weights.csv", weights_csv(weights)});
  out.artifacts.push_back({"trace.csv", trace_csv(trace)});
  out.artifacts.push_back({"trace.dgpt", encode_tensor(trace_tensor(trace, spec.n))});
  out.artifacts.push_back({"summary.csv", summary_csv(trace)});
  out.artifacts.push_back({"structures.csv", structures_csv(trace, weights)});
  if (!weights.note.empty()) out.warnings.push_back(weights.note);
  return out;
}

// ---------------------------------------------------------------- diagnose

RunResult cmd_diagnose(FieldReader& r, const Globals& g) {
  auto spec = prior_spec_from_json(r.raw("prior"), r.at("prior"));
  const int d = prior_input_dim(spec, r.at("prior"));
  const auto Cs = real_list(r, "C", {1.0, 2.0, 4.0});
  for (double c : Cs) require(c >= 1, "every C must be >= 1", r.at("C"));
  const bool node_cap = r.get_or("node_cap", false);
  RunResult out;
  out.seed = g.seed;

  if (r.has("trace")) {
    // post-hoc mode: model mass of a saved fit
    const auto path = r.get<std::string>("trace");
    require(r.has("truth"), "model mass of a saved trace needs truth.structure", r.at("truth"));
    const auto truth = truth_from_json(r.raw("truth"), r.at("truth"), spec, d, g.seed);
    require(truth.truth.structure.has_value(), "model mass needs truth.structure", r.at("truth"));
    r.finish();
    const auto tensor = decode_tensor(read_file(path));
    const auto trace = trace_from_tensor(tensor);
    spec.n = tensor.meta.at("n").get<double>();
    const auto weights = structure_prior_weights(spec);
    require(weights.entries.size() == trace.structure_labels.size(),
            "trace was produced under a different prior", "/trace");
    CsvWriter mm({"n", "C", "mass"});
    for (double C : Cs) {
      const auto m = model_mass(trace, weights, spec, *truth.truth.structure, C, node_cap);
      mm.field(spec.n).field(C).field(m.mass);
      mm.end_row();
      if (!m.warning.empty()) out.warnings.push_back(m.warning);
    }
    std::vector<double> errs;
    for (const auto& row : trace.rows)
      if (trace.kept(row)) errs.push_back(row.l2_error);
    CsvWriter con({"n", "median_error", "eps_n", "minimax_rate", "eps_log_inflated"});
    const double eps = eps_structure(*truth.truth.structure, spec.profile, spec.n);
    con.field(spec.n).field(median(errs)).field(eps).field(minimax_rate(*truth.truth.structure, spec.n).rate)
        .field(eps * std::pow(std::log(spec.n), 1.0 + std::log(spec.profile.holder_radius)));
    con.end_row();
    out.artifacts.push_back({"model_mass.csv", mm.str()});
    out.artifacts.push_back({"contraction.csv", con.str()});
    return out;
  }

  auto cfg = read_mcmc(r, g);
  const auto n_list = real_list(r, "n_list", {200, 800, 3200});
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    require(n_list[i] >= 3 && n_list[i] == std::floor(n_list[i]), "n_list entries must be integers >= 3",
            r.at("n_list"));
    require(i == 0 || n_list[i] > n_list[i - 1], "n_list must be increasing", r.at("n_list"));
  }
  const auto seeds = r.get_or<std::vector<std::uint64_t>>("seeds", {1, 2, 3, 4, 5});
  require(!seeds.empty(), "seeds must not be empty", r.at("seeds"));
  const double noise_sd = r.get_or("noise_sd", 1.0);
  require(noise_sd >= 0, "noise_sd must be >= 0", r.at("noise_sd"));
  const auto truth = truth_from_json(r.raw("truth"), r.at("truth"), spec, d, g.seed);
  r.finish();
  const auto& eta_star = truth.truth.structure;

  CsvWriter con({"n", "median_error", "eps_n", "minimax_rate", "eps_log_inflated"});
  CsvWriter con_seeds({"n", "seed", "median_error"});
  CsvWriter mass({"n", "C", "median_mass", "min_mass", "max_mass"});
  CsvWriter mass_seeds({"n", "seed", "C", "mass"});
  CsvWriter smass({"n", "structure_id", "label", "prior_weight", "median_mass"});
  std::vector<double> log_n, log_err;
  for (double n : n_list) {
    spec.n = n;
    const auto weights = structure_prior_weights(spec);
    std::vector<double> errs;
    std::vector<std::vector<double>> masses(Cs.size());
    std::vector<std::vector<double>> per_structure(weights.entries.size());
    for (auto seed : seeds) {
      const auto run = run_seed(truth.truth, d, spec, weights, cfg, seed, noise_sd);
      errs.push_back(run.median_error);
      con_seeds.field(n).field(static_cast<std::size_t>(seed)).field(run.median_error);
      con_seeds.end_row();
      for (std::size_t s = 0; s < weights.entries.size(); ++s)
        per_structure[s].push_back(structure_mass(run.trace, s));
      if (!eta_star) continue;
      for (std::size_t c = 0; c < Cs.size(); ++c) {
        const auto m = model_mass(run.trace, weights, spec, *eta_star, Cs[c], node_cap);
        masses[c].push_back(m.mass);
        mass_seeds.field(n).field(static_cast<std::size_t>(seed)).field(Cs[c]).field(m.mass);
        mass_seeds.end_row();
        if (!m.warning.empty() &&
            std::find(out.warnings.begin(), out.warnings.end(), m.warning) == out.warnings.end())
          out.warnings.push_back(m.warning);
      }
    }
    const double med = median(errs);
    log_n.push_back(std::log(n));
    log_err.push_back(std::log(med));
    double eps = kNaN, mm = kNaN;
    if (eta_star) {
      eps = eps_structure(*eta_star, spec.profile, n);
      mm = minimax_rate(*eta_star, n).rate;
    }
    con.field(n).field(med).field(eps).field(mm)
        .field(eps * std::pow(std::log(n), 1.0 + std::log(spec.profile.holder_radius)));
    con.end_row();
    for (std::size_t c = 0; eta_star && c < Cs.size(); ++c) {
      const auto& v = masses[c];
      mass.field(n).field(Cs[c]).field(median(v)).field(*std::min_element(v.begin(), v.end()))
          .field(*std::max_element(v.begin(), v.end()));
      mass.end_row();
    }
    for (std::size_t s = 0; s < weights.entries.size(); ++s) {
      smass.field(n).field(s).field(structure_label(weights.entries[s].structure))
          .field(weights.entries[s].weight).field(median(per_structure[s]));
      smass.end_row();
    }
  }
  CsvWriter slope({"points", "log_log_slope"});
  slope.field(log_n.size()).field(log_n.size() >= 2 ? ols_slope(log_n, log_err) : kNaN);
  slope.end_row();

  out.artifacts.push_back({"contraction.csv", con.str()});
  out.artifacts.push_back({"contraction_seeds.csv", con_seeds.str()});
  out.artifacts.push_back({"contraction_slope.csv", slope.str()});
  out.artifacts.push_back({"structure_mass.csv", smass.str()});
  if (eta_star) {
    out.artifacts.push_back({"model_mass.csv", mass.str()});
    out.artifacts.push_back({"model_mass_seeds.csv", mass_seeds.str()});
  } else {
    out.warnings.push_back("truth has no structure: model mass and eps_n are not reported");
  }
  return out;
}

// ---------------------------------------------------------------- verify

RunResult cmd_verify(FieldReader& r, const Globals& g, const RunOptions& opt) {
  auto suite = r.get_or<std::string>("suite", "all");
  if (opt.suite) suite = *opt.suite;
  r.finish();
  RunResult out;
  out.seed = g.seed;
  out.checks = run_verify_suite(suite, g.seed);
  out.artifacts.push_back({"verify.csv", checks_csv(out.checks)});
  return out;
}

}  // namespace

int RunResult::failed_checks() const {
  return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.passed; }));
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"rates", "sample", "prior", "fit", "diagnose", "verify"};
  return names;
}

std::string checks_csv(const std::vector<CheckResult>& checks) {
  CsvWriter csv({"suite", "check", "passed", "value", "bound", "detail"});
  for (const auto& c : checks) {
    std::string detail = c.detail;
    std::replace(detail.begin(), detail.end(), ',', ';');
    csv.field(c.suite).field(c.name).field(c.passed ? 1 : 0).field(c.value).field(c.bound).field(detail);
    csv.end_row();
  }
  return csv.str();
}

RunResult run_experiment(const std::string& command, const json& config, const RunOptions& options) {
  FieldReader r(config, "");
  const auto g = read_globals(r, options);
  if (command == "rates") return cmd_rates(r, g);
  if (command == "sample") return cmd_sample(r, g);
  if (command == "prior") return cmd_prior(r, g);
  if (command == "fit") return cmd_fit(r, g);
  if (command == "diagnose") return cmd_diagnose(r, g);
  if (command == "verify") return cmd_verify(r, g, options);
  fail(ErrorKind::Validation, "unknown command '" + command + "'");
}

}  // namespace deepgp
