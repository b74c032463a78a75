#include "mhdlab/harness.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mhdlab/error.hpp"

namespace mhdlab {

namespace {

// ---- config --------------------------------------------------------------

template <class T>
T scalar(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

void expect_map(const YAML::Node& node, const std::string& where) {
  if (!node.IsMap()) throw ConfigError("config section '" + where + "' must be a mapping");
}

DataKind parse_kind(const std::string& s) {
  if (s == "well_prepared") return DataKind::well_prepared;
  if (s == "ill_prepared") return DataKind::ill_prepared;
  throw ConfigError("data.kind must be well_prepared or ill_prepared, got '" + s + "'");
}

const char* kind_name(DataKind k) { return k == DataKind::well_prepared ? "well_prepared" : "ill_prepared"; }

void parse_grid(const YAML::Node& n, RunConfig& c) {
  expect_map(n, "grid");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (key == "n1") c.n1 = scalar<int>(kv.second, key);
    else if (key == "n2") c.n2 = scalar<int>(kv.second, key);
    else if (key == "L1") c.L1 = scalar<double>(kv.second, key);
    else if (key == "L2") c.L2 = scalar<double>(kv.second, key);
    else throw ConfigError("unknown key grid." + key);
  }
}

void parse_data(const YAML::Node& n, DataFamily& d) {
  expect_map(n, "data");
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (key == "kind") d.kind = parse_kind(scalar<std::string>(kv.second, key));
    else if (key == "amp_v") d.amp_v = scalar<double>(kv.second, key);
    else if (key == "amp_H") d.amp_H = scalar<double>(kv.second, key);
    else if (key == "amp_v3") d.amp_v3 = scalar<double>(kv.second, key);
    else if (key == "amp_H3") d.amp_H3 = scalar<double>(kv.second, key);
    else if (key == "amp_phi") d.amp_phi = scalar<double>(kv.second, key);
    else if (key == "amp_q") d.amp_q = scalar<double>(kv.second, key);
    else if (key == "support") d.support = scalar<double>(kv.second, key);
    else if (key == "pulse_center") d.pulse_center = scalar<double>(kv.second, key);
    else if (key == "pulse_width") d.pulse_width = scalar<double>(kv.second, key);
    else if (key == "mode_v") d.mode_v = scalar<int>(kv.second, key);
    else if (key == "mode_H") d.mode_H = scalar<int>(kv.second, key);
    else if (key == "vanishing_order") d.vanishing_order = scalar<int>(kv.second, key);
    else if (key == "seed") d.seed = scalar<std::uint64_t>(kv.second, key);
    else throw ConfigError("unknown key data." + key);
  }
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string lambda_tag(double lambda) { return format_double(lambda); }

// ---- metrics ---------------------------------------------------------------

struct Restriction {
  int r1 = 1;
  int r2 = 1;
};

Restriction nesting(const Grid& coarse, const Grid& fine) {
  if (coarse.L1 != fine.L1 || coarse.L2 != fine.L2) throw PreconditionError("grids cover different slabs");
  if ((fine.n1 - 1) % (coarse.n1 - 1) != 0 || fine.n2 % coarse.n2 != 0) {
    throw PreconditionError("reference grid is not a nested refinement");
  }
  return {(fine.n1 - 1) / (coarse.n1 - 1), fine.n2 / coarse.n2};
}

bool in_region(const Grid& g, int i, const Subdomain& k) {
  const double x = g.x1(i);
  return x >= k.x1_lo - 1e-12 * g.L1 && x <= k.x1_hi + 1e-12 * g.L1;
}

NormSpec spec(NormFamily family, int m) {
  NormSpec s;
  s.family = family;
  s.m = m;
  return s;
}

double norm_star1_local(const GridFunction& f, const Grid& g, const Subdomain& k) {
  NormSpec s = spec(NormFamily::star, 1);
  s.subdomain = k;
  return norm_spatial(f, s, g).total;
}

double l2_norm(const GridFunction& f, const Grid& g) { return std::sqrt(l2_squared(f, g)); }

GridFunction scaled(const GridFunction& f, double a) {
  GridFunction g = f;
  for (double& v : g.storage()) v *= a;
  return g;
}

// |u|_{2,**}^2 + |w u_t|_{1,**}^2.
double state_spacetime(const StateField& u, const StateField& u_t, double w, const Grid& g) {
  const double a = norm_spatial(u, spec(NormFamily::star2, 2), g).total;
  double b = 0.0;
  for (int c = 0; c < kNumComponents; ++c) {
    const double t = norm_spatial(scaled(u_t[c], w), spec(NormFamily::star2, 1), g).total;
    b += t * t;
  }
  return std::sqrt(a * a + b);
}

const LimitSample* find_at(const std::vector<LimitSample>& v, double t) {
  const double tol = 1e-9 * std::max(1.0, std::abs(t));
  for (const auto& s : v)
    if (std::abs(s.t - t) <= tol) return &s;
  return nullptr;
}

struct LambdaResult {
  std::vector<ConvergenceRow> rows;
  std::optional<FailedRun> failure;
};

LambdaResult run_one(const RunConfig& cfg, double lambda, const Grid& grid, const Grid& ref_grid,
                     const std::vector<LimitSample>& ref, const MaterialLaw& law, const SweepOptions& opt) {
  LambdaResult res;
  const StateField u0 = make_initial_data(cfg.data, grid, lambda, law);
  SolverConfig sc = cfg.solver_config(lambda);
  sc.store_states = false;
  const Subdomain K = cfg.region();
  StateField last;
  double last_t = 0.0;
  const auto on_output = [&](const TrajectorySample& s) {
    const LimitSample* b = find_at(ref, s.t);
    if (b == nullptr) throw SolverError("reference has no sample at t = " + format_double(s.t));
    const LimitSample a = limit_sample(s, grid);
    const LimitMetrics m = compare_samples(a, grid, *b, ref_grid, K);
    ConvergenceRow row;
    row.lambda = lambda;
    row.t = s.t;
    row.err_v = m.err_v;
    row.err_q = m.err_q;
    row.err_H = m.err_H;
    row.grad_q_err = m.grad_q_err;
    row.norm_ss_lambda = state_spacetime(s.u, s.u_t, 1.0 / lambda, grid);
    row.norm_ss_unweighted = state_spacetime(s.u, s.u_t, 1.0, grid);
    const StateField u = apply_ghost_fill(s.u);
    const GridFunction dq1 = diff(u[kQ], 1, grid), dq2 = diff(u[kQ], 2, grid);
    const GridFunction dv = divergence(u[kV1], u[kV2], grid);
    row.wp_metric = lambda * (std::sqrt(l2_squared(dq1, grid) + l2_squared(dq2, grid)) + l2_norm(dv, grid));
    row.divH = s.div_H;
    res.rows.push_back(row);
    if (cfg.write_checkpoints) {
      last = s.u;
      last_t = s.t;
    }
    if (opt.verbose && res.rows.size() % 20 == 1) {
      std::cerr << "  lambda " << lambda << "  t " << s.t << "  err_v " << m.err_v << "\n";
    }
  };
  const Trajectory traj = run(sc, grid, u0, law, on_output);
  const RunDiagnostics& d = traj.diagnostics;
  if (d.blew_up) {
    res.failure = FailedRun{lambda, d.blowup_time, d.failure};
    res.rows.clear();
    return res;
  }
  // Energy checks between consecutive rows.
  double prev = -1.0;
  for (ConvergenceRow& row : res.rows) {
    for (const EnergyCheck& e : d.energy_checks)
      if (e.t > prev && e.t <= row.t) row.energy_residual = std::max(row.energy_residual, e.residual);
    prev = row.t;
  }
  for (const ConvergenceRow& row : res.rows) {
    const double vals[] = {row.err_v, row.err_q, row.err_H, row.norm_ss_lambda, row.wp_metric,
                           row.divH,  row.energy_residual, row.grad_q_err, row.norm_ss_unweighted};
    for (double v : vals) {
      if (!std::isfinite(v)) {
        res.failure = FailedRun{lambda, row.t, "non-finite table value"};
        res.rows.clear();
        return res;
      }
    }
  }
  if (cfg.write_checkpoints && last.n1() > 0) {
    save_checkpoint(std::filesystem::path(cfg.out_dir) / ("lambda_" + lambda_tag(lambda) + ".ckpt"), last, grid,
                    last_t, law.tag);
  }
  return res;
}

}  // namespace

// ---- RunConfig ---------------------------------------------------------------

void RunConfig::validate() const {
  if (n1 < 9 || n2 < 4) throw ConfigError("grid too small");
  if (!(L1 > 0.0 && L2 > 0.0)) throw ConfigError("grid lengths must be positive");
  if (lambdas.empty()) throw ConfigError("lambda list is empty");
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] >= 1.0)) throw ConfigError("every lambda must be >= 1");
    if (k > 0 && !(lambdas[k] > lambdas[k - 1])) throw ConfigError("lambda list must be strictly increasing");
  }
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  if (!(cfl > 0.0 && cfl <= 2.0)) throw ConfigError("cfl must lie in (0, 2]");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
  if (!(output_dt > 0.0)) throw ConfigError("output_dt must be positive");
  if (clean_every < 0 || energy_every < 0) throw ConfigError("step intervals must be non-negative");
  if (!(sponge.strength >= 0.0) || !(sponge.start > 0.0 && sponge.start < 1.0)) throw ConfigError("bad sponge");
  if (!(subdomain.x1_lo >= 0.0 && subdomain.x1_lo < subdomain.x1_hi && subdomain.x1_hi <= 1.0)) {
    throw ConfigError("subdomain must satisfy 0 <= x1_lo < x1_hi <= 1");
  }
  if (!(t0_fraction > 0.0 && t0_fraction < 1.0)) throw ConfigError("t0_fraction must lie in (0, 1)");
  if (reference_refinement < 1) throw ConfigError("reference_refinement must be >= 1");
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  try {
    MaterialLaw::from_tag(eos);
    build_grid(n1, n2, L1, L2);
    make_initial_data(data, build_grid(n1, n2, L1, L2), lambdas.front(), MaterialLaw::from_tag(eos));
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  } catch (const HyperbolicityError& e) {
    throw ConfigError(std::string("initial data not admissible: ") + e.what());
  }
}

Grid RunConfig::grid() const { return build_grid(n1, n2, L1, L2); }

Grid RunConfig::reference_grid() const {
  return build_grid((n1 - 1) * reference_refinement + 1, n2 * reference_refinement, L1, L2);
}

SolverConfig RunConfig::solver_config(double lambda) const {
  SolverConfig s;
  s.lambda = lambda;
  s.cfl = cfl;
  s.epsilon = epsilon;
  s.T = T;
  s.clean_every = clean_every;
  s.output_dt = output_dt;
  s.energy_every = energy_every;
  s.sponge = sponge;
  return s;
}

IncompressibleConfig RunConfig::reference_config() const {
  IncompressibleConfig c;
  c.cfl = cfl;
  c.epsilon = epsilon;
  c.T = T;
  c.output_dt = output_dt;
  c.store_states = true;
  return c;
}

RunConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  RunConfig c;
  if (root.IsNull()) return c;
  expect_map(root, "top level");
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    const YAML::Node& v = kv.second;
    if (key == "grid") parse_grid(v, c);
    else if (key == "eos") c.eos = scalar<std::string>(v, key);
    else if (key == "data") parse_data(v, c.data);
    else if (key == "lambdas") {
      if (!v.IsSequence()) throw ConfigError("lambdas must be a list");
      c.lambdas.clear();
      for (const auto& x : v) c.lambdas.push_back(scalar<double>(x, key));
    } else if (key == "T") c.T = scalar<double>(v, key);
    else if (key == "cfl") c.cfl = scalar<double>(v, key);
    else if (key == "epsilon") c.epsilon = scalar<double>(v, key);
    else if (key == "output_dt") c.output_dt = scalar<double>(v, key);
    else if (key == "clean_every") c.clean_every = scalar<int>(v, key);
    else if (key == "energy_every") c.energy_every = scalar<int>(v, key);
    else if (key == "sponge") {
      expect_map(v, key);
      for (const auto& s : v) {
        const auto k = s.first.as<std::string>();
        if (k == "start") c.sponge.start = scalar<double>(s.second, k);
        else if (k == "strength") c.sponge.strength = scalar<double>(s.second, k);
        else throw ConfigError("unknown key sponge." + k);
      }
    } else if (key == "subdomain") {
      expect_map(v, key);
      for (const auto& s : v) {
        const auto k = s.first.as<std::string>();
        if (k == "x1_lo") c.subdomain.x1_lo = scalar<double>(s.second, k);
        else if (k == "x1_hi") c.subdomain.x1_hi = scalar<double>(s.second, k);
        else throw ConfigError("unknown key subdomain." + k);
      }
    } else if (key == "t0_fraction") c.t0_fraction = scalar<double>(v, key);
    else if (key == "reference_refinement") c.reference_refinement = scalar<int>(v, key);
    else if (key == "jobs") c.jobs = scalar<int>(v, key);
    else if (key == "out_dir") c.out_dir = scalar<std::string>(v, key);
    else if (key == "write_checkpoints") c.write_checkpoints = scalar<bool>(v, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

std::string dump_config(const RunConfig& c) {
  const auto f = format_double;
  std::ostringstream o;
  o << "grid: {n1: " << c.n1 << ", n2: " << c.n2 << ", L1: " << f(c.L1) << ", L2: " << f(c.L2) << "}\n";
  o << "eos: \"" << c.eos << "\"\n";
  const DataFamily& d = c.data;
  o << "data: {kind: " << kind_name(d.kind) << ", amp_v: " << f(d.amp_v) << ", amp_H: " << f(d.amp_H)
    << ", amp_v3: " << f(d.amp_v3) << ", amp_H3: " << f(d.amp_H3) << ", amp_phi: " << f(d.amp_phi)
    << ", amp_q: " << f(d.amp_q) << ", support: " << f(d.support) << ", pulse_center: " << f(d.pulse_center)
    << ", pulse_width: " << f(d.pulse_width) << ", mode_v: " << d.mode_v << ", mode_H: " << d.mode_H
    << ", vanishing_order: " << d.vanishing_order << ", seed: " << d.seed << "}\n";
  o << "lambdas: [";
  for (std::size_t k = 0; k < c.lambdas.size(); ++k) o << (k ? ", " : "") << f(c.lambdas[k]);
  o << "]\n";
  o << "T: " << f(c.T) << "\ncfl: " << f(c.cfl) << "\nepsilon: " << f(c.epsilon) << "\noutput_dt: " << f(c.output_dt)
    << "\nclean_every: " << c.clean_every << "\nenergy_every: " << c.energy_every << "\n";
  o << "sponge: {start: " << f(c.sponge.start) << ", strength: " << f(c.sponge.strength) << "}\n";
  o << "subdomain: {x1_lo: " << f(c.subdomain.x1_lo) << ", x1_hi: " << f(c.subdomain.x1_hi) << "}\n";
  o << "t0_fraction: " << f(c.t0_fraction) << "\nreference_refinement: " << c.reference_refinement << "\n";
  return o.str();
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : dump_config(config)) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return hex64(h);
}

// ---- table ---------------------------------------------------------------

CsvTable to_csv(const ConvergenceTable& table) {
  CsvTable t;
  t.header = kTableColumns;
  for (const auto& r : table.rows) {
    t.rows.push_back({r.lambda, r.t, r.err_v, r.err_q, r.err_H, r.norm_ss_lambda, r.wp_metric, r.divH,
                      r.energy_residual, r.grad_q_err, r.norm_ss_unweighted});
  }
  return t;
}

ConvergenceTable table_from_csv(const CsvTable& csv) {
  if (csv.header != kTableColumns) throw IoError("CSV header does not match the convergence table columns");
  ConvergenceTable t;
  for (const auto& v : csv.rows) {
    ConvergenceRow r{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10]};
    if (t.lambdas.empty() || t.lambdas.back() != r.lambda) t.lambdas.push_back(r.lambda);
    t.rows.push_back(r);
  }
  return t;
}

// ---- limit comparison -----------------------------------------------------------

std::vector<LimitSample> limit_samples(const IncompressibleTrajectory& traj, const MaterialLaw& law) {
  std::vector<LimitSample> out;
  out.reserve(traj.samples.size());
  for (const auto& s : traj.samples) {
    LimitSample l;
    l.t = s.t;
    l.w = s.state.w;
    l.B = s.state.B;
    l.grad_total_pressure = recover_total_pressure_gradient(s.state, traj.grid, law);
    out.push_back(std::move(l));
  }
  return out;
}

LimitSample limit_sample(const TrajectorySample& s, const Grid& grid) {
  LimitSample l;
  l.t = s.t;
  const StateField u = apply_ghost_fill(s.u);
  l.w = {u[kV1], u[kV2], u[kV3]};
  l.B = {u[kH1], u[kH2], u[kH3]};
  l.q = u[kQ];
  l.grad_total_pressure = {scaled(diff(u[kQ], 1, grid), u.lambda), scaled(diff(u[kQ], 2, grid), u.lambda)};
  return l;
}

std::vector<LimitSample> limit_samples(const Trajectory& traj) {
  std::vector<LimitSample> out;
  for (const auto& s : traj.samples) out.push_back(limit_sample(s, traj.grid));
  return out;
}

LimitMetrics compare_samples(const LimitSample& a, const Grid& ga, const LimitSample& b, const Grid& gb,
                             const Subdomain& K) {
  const Restriction r = nesting(ga, gb);
  const auto restricted_diff = [&](const GridFunction& fa, const GridFunction& fb) {
    GridFunction d(ga);
    for (int i = 0; i < ga.n1; ++i)
      for (int j = 0; j < ga.n2; ++j) {
        const double va = fa.n1() > 0 ? fa(i, j) : 0.0;
        const double vb = fb.n1() > 0 ? fb(i * r.r1, j * r.r2) : 0.0;
        d(i, j) = va - vb;
      }
    return d;
  };
  LimitMetrics m;
  m.t = a.t;
  double ev = 0.0, evs = 0.0, eh = 0.0;
  std::array<GridFunction, 3> dv;
  for (int c = 0; c < 3; ++c) {
    const auto C = static_cast<std::size_t>(c);
    dv[C] = restricted_diff(a.w[C], b.w[C]);
    ev += l2_squared(dv[C], ga, K);
    const double s = norm_star1_local(dv[C], ga, K);
    evs += s * s;
    const double h = norm_star1_local(restricted_diff(a.B[C], b.B[C]), ga, K);
    eh += h * h;
  }
  m.err_v = std::sqrt(ev);
  m.err_v_star = std::sqrt(evs);
  m.err_H = std::sqrt(eh);
  if (a.q.n1() > 0 || b.q.n1() > 0) m.err_q = std::sqrt(l2_squared(restricted_diff(a.q, b.q), ga, K));
  const GridFunction g1 = restricted_diff(a.grad_total_pressure.c1, b.grad_total_pressure.c1);
  const GridFunction g2 = restricted_diff(a.grad_total_pressure.c2, b.grad_total_pressure.c2);
  for (int i = 0; i < ga.n1; ++i) {
    if (!in_region(ga, i, K)) continue;
    for (int j = 0; j < ga.n2; ++j) {
      m.grad_q_err = std::max(m.grad_q_err, std::hypot(g1(i, j), g2(i, j)));
      m.sup_err_v = std::max(m.sup_err_v, std::sqrt(dv[0](i, j) * dv[0](i, j) + dv[1](i, j) * dv[1](i, j) +
                                                    dv[2](i, j) * dv[2](i, j)));
    }
  }
  return m;
}

std::vector<LimitMetrics> compare_to_limit(const std::vector<LimitSample>& a, const Grid& grid_a,
                                           const std::vector<LimitSample>& b, const Grid& grid_b,
                                           const Subdomain& region, const TimeWindow& window) {
  std::vector<LimitMetrics> out;
  for (const auto& s : a) {
    if (s.t < window.t0 || s.t > window.t1) continue;
    if (const LimitSample* m = find_at(b, s.t)) out.push_back(compare_samples(s, grid_a, *m, grid_b, region));
  }
  if (out.empty()) throw PreconditionError("compare_to_limit: trajectories share no timestamps in the window");
  return out;
}

// ---- layer detection --------------------------------------------------------------

LayerReport detect_initial_layer(const ConvergenceTable& table, double t0) {
  LayerReport rep;
  rep.t0 = t0;
  std::vector<double> lambdas;
  for (const auto& r : table.rows)
    if (std::find(lambdas.begin(), lambdas.end(), r.lambda) == lambdas.end()) lambdas.push_back(r.lambda);
  std::sort(lambdas.begin(), lambdas.end());
  if (lambdas.empty()) throw PreconditionError("detect_initial_layer: empty table");
  for (double lam : lambdas) {
    LayerEntry e;
    e.lambda = lam;
    bool early = false, late = false;
    for (const auto& r : table.rows) {
      if (r.lambda != lam) continue;
      if (r.t <= t0) {
        e.e_early = std::max(e.e_early, r.err_v);
        early = true;
      }
      if (r.t >= t0) {
        e.e_late = std::max(e.e_late, r.err_v);
        late = true;
      }
    }
    if (!early || !late) {
      throw PreconditionError("detect_initial_layer: lambda " + format_double(lam) + " lacks samples around t0");
    }
    e.ratio = e.e_late > 0.0 ? e.e_early / e.e_late : (e.e_early > 0.0 ? INFINITY : 1.0);
    rep.entries.push_back(e);
  }
  if (rep.entries.size() >= 2) {
    bool inc = true, dec = true;
    double lo = INFINITY, hi = 0.0;
    for (std::size_t k = 0; k < rep.entries.size(); ++k) {
      lo = std::min(lo, rep.entries[k].e_early);
      hi = std::max(hi, rep.entries[k].e_early);
      if (k == 0) continue;
      inc = inc && rep.entries[k].ratio > rep.entries[k - 1].ratio;
      dec = dec && rep.entries[k].e_late < rep.entries[k - 1].e_late;
    }
    rep.ratio_increasing = inc;
    rep.late_decreasing = dec;
    rep.early_spread = lo > 0.0 ? hi / lo : INFINITY;
    rep.layer = inc;
  }
  return rep;
}

// ---- sweep -------------------------------------------------------------------------

ConvergenceTable run_sweep(const RunConfig& config, const SweepOptions& options) {
  config.validate();
  const MaterialLaw law = MaterialLaw::from_tag(config.eos);
  const Grid grid = config.grid();
  const Grid ref_grid = config.reference_grid();
  nesting(grid, ref_grid);

  ConvergenceTable table;
  table.T = config.T;
  table.config_hash = config_hash(config);
  table.lambdas = config.lambdas;

  // The limit velocity and field do not depend on lambda.
  const StateField u_ref = make_initial_data(config.data, ref_grid, config.lambdas.front(), law);
  if (options.verbose) std::cerr << "incompressible reference on " << ref_grid.n1 << "x" << ref_grid.n2 << "\n";
  const IncompressibleTrajectory ref_traj =
      run_incompressible(config.reference_config(), ref_grid, IncompressibleState::from(u_ref), law);
  const std::vector<LimitSample> ref = limit_samples(ref_traj, law);

  {
    const StateField u0 = make_initial_data(config.data, grid, config.lambdas.front(), law);
    const PlaneVector pg = project_G(PlaneVector{u0[kV1], u0[kV2]}, grid);
    table.pg_norm = std::sqrt(l2_squared(pg.c1, grid, config.region()) + l2_squared(pg.c2, grid, config.region()));
  }

  std::vector<LambdaResult> results(config.lambdas.size());
  const std::size_t jobs = static_cast<std::size_t>(config.jobs);
  for (std::size_t start = 0; start < config.lambdas.size(); start += jobs) {
    std::vector<std::future<LambdaResult>> batch;
    for (std::size_t k = start; k < std::min(start + jobs, config.lambdas.size()); ++k) {
      const double lam = config.lambdas[k];
      if (options.verbose) std::cerr << "compressible run lambda = " << lam << "\n";
      batch.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async,
                                 [&, lam] { return run_one(config, lam, grid, ref_grid, ref, law, options); }));
    }
    for (std::size_t k = 0; k < batch.size(); ++k) results[start + k] = batch[k].get();
  }
  for (auto& r : results) {
    if (r.failure) table.failures.push_back(*r.failure);
    table.rows.insert(table.rows.end(), r.rows.begin(), r.rows.end());
  }

  if (options.write_files) {
    const std::filesystem::path dir(config.out_dir);
    std::ostringstream csv;
    write_csv(to_csv(table), csv);
    write_file_atomic(dir / "table.csv", csv.str());
    write_file_atomic(dir / "meta.json", sweep_metadata_json(config, table));
  }
  return table;
}

std::string sweep_metadata_json(const RunConfig& config, const ConvergenceTable& table) {
  const Grid g = config.grid();
  nlohmann::ordered_json j;
  j["config_hash"] = table.config_hash.empty() ? config_hash(config) : table.config_hash;
  j["config"] = dump_config(config);
  j["grid"] = {{"n1", g.n1}, {"n2", g.n2}, {"L1", g.L1}, {"L2", g.L2}};
  j["sigma"] = {{"kind", "linear-quintic-constant"},
                {"blend_start", g.sigma.blend_start()},
                {"blend_end", g.sigma.blend_end()}};
  j["eos"] = config.eos;
  j["columns"] = kTableColumns;
  j["lambdas"] = table.lambdas;
  j["T"] = table.T;
  j["t0"] = config.t0_fraction * config.T;
  j["pg_norm"] = table.pg_norm;
  auto& f = j["failures"] = nlohmann::ordered_json::array();
  for (const auto& r : table.failures) {
    f.push_back({{"lambda", r.lambda}, {"blowup_time", r.blowup_time}, {"failure", r.failure}});
  }
  return j.dump(2) + "\n";
}

}  // namespace mhdlab
