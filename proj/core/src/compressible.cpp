#include "mhdlab/compressible.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mhdlab/error.hpp"

namespace mhdlab {

namespace {

double smoothstep5(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  return x * x * x * (10.0 - 15.0 * x + 6.0 * x * x);
}

Vec7 column(const std::array<GridFunction, kNumComponents>& f, int i, int j) {
  Vec7 r;
  for (int c = 0; c < kNumComponents; ++c) r[static_cast<std::size_t>(c)] = f[static_cast<std::size_t>(c)](i, j);
  return r;
}

double dot(const Vec7& a, const Vec7& b) {
  double s = 0.0;
  for (std::size_t c = 0; c < 7; ++c) s += a[c] * b[c];
  return s;
}

// Combination u <- a u + b (w + dt L), used by the SSPRK3 stages.
StateField combine(double a, const StateField& u, double b, const StateField& w, double dt, const StateField& L) {
  StateField out = w;
  axpy(dt, L, out);
  for (int c = 0; c < kNumComponents; ++c) {
    auto& dst = out[c].storage();
    const auto& src = u[c].storage();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] = a * src[k] + b * dst[k];
  }
  return out;
}

}  // namespace

CompressibleModel::CompressibleModel(const Grid& grid, const SolverConfig& config, MaterialLaw law)
    : grid_(grid), config_(config), law_(std::move(law)), q_ref_(grid), v1_ref_(grid) {
  if (!(config.lambda > 0.0)) throw PreconditionError("lambda must be positive");
  if (!(config.cfl > 0.0)) throw PreconditionError("cfl must be positive");
  if (config.epsilon < 0.0) throw PreconditionError("epsilon must be non-negative");
  if (config.sponge.strength < 0.0 || config.sponge.start <= 0.0 || config.sponge.start >= 1.0) {
    throw PreconditionError("sponge: need strength >= 0 and 0 < start < 1");
  }
  sponge_rate_.assign(static_cast<std::size_t>(grid.n1), 0.0);
  if (config.sponge.strength > 0.0) {
    const double x0 = config.sponge.start * grid.L1;
    const double width = grid.L1 - x0;
    const double peak = config.sponge.strength * config.lambda * std::sqrt(law_.mu1() * law_.mu2()) / width;
    for (int i = 0; i < grid.n1; ++i) {
      sponge_rate_[static_cast<std::size_t>(i)] = peak * smoothstep5((grid.x1(i) - x0) / width);
    }
  }
}

double CompressibleModel::max_signal_speed(const StateField& u) const {
  return max_transport_speed(u) + 1.5 * u.lambda * std::sqrt(law_.mu1() * law_.mu2());
}

double CompressibleModel::max_transport_speed(const StateField& u) const {
  double m = 0.0;
  for (int i = 0; i < u.n1(); ++i) {
    for (int j = 0; j < u.n2(); ++j) {
      const NodeState s = NodeState::from(u, i, j);
      const NodeCoefficients k = node_coefficients(s, u.lambda, law_);
      const double v = std::sqrt(s.v[0] * s.v[0] + s.v[1] * s.v[1] + s.v[2] * s.v[2]);
      const double H = std::sqrt(s.H[0] * s.H[0] + s.H[1] * s.H[1] + s.H[2] * s.H[2]);
      m = std::max(m, v + H / std::sqrt(k.rho));
    }
  }
  return m;
}

double CompressibleModel::stable_dt(const StateField& u) const {
  return config_.cfl * std::min(grid_.dx1, grid_.dx2) / max_signal_speed(u);
}

StateField CompressibleModel::dissipation(const StateField& u_in) const {
  const StateField u = apply_ghost_fill(u_in, {}, config_.injected_wall_v1);
  StateField out(grid_, u.lambda);
  if (config_.epsilon > 0.0) {
    // Only q, v1 and v2 carry the lambda-fast acoustic waves; the other
    // components are damped at the transport speed, as in the limit solver.
    const double slow = max_transport_speed(u);
    const double fast = slow + 1.5 * u.lambda * std::sqrt(law_.mu1() * law_.mu2());
    for (int c = 0; c < kNumComponents; ++c) {
      const double coef = config_.epsilon * (c == kQ ? fast : slow);
      const GridFunction d1 = fourth_difference(u[c], 1);
      const GridFunction d2 = fourth_difference(u[c], 2);
      for (int i = 0; i < grid_.n1; ++i)
        for (int j = 0; j < grid_.n2; ++j) out[c](i, j) = -coef * (d1(i, j) / grid_.dx1 + d2(i, j) / grid_.dx2);
    }
  }
  if (config_.sponge.strength > 0.0) {
    for (int i = 0; i < grid_.n1; ++i) {
      const double s = sponge_rate_[static_cast<std::size_t>(i)];
      if (s == 0.0) continue;
      for (int j = 0; j < grid_.n2; ++j) {
        out[kQ](i, j) -= s * (u[kQ](i, j) - q_ref_(i, j));
        out[kV1](i, j) -= s * (u[kV1](i, j) - v1_ref_(i, j));
      }
    }
  }
  for (int j = 0; j < grid_.n2; ++j) {
    for (int i : {0, grid_.n1 - 1}) {
      out[kV1](i, j) = 0.0;
      out[kH1](i, j) = 0.0;
    }
  }
  return out;
}

StateField CompressibleModel::rhs(const StateField& u_in) const {
  const StateField u = apply_ghost_fill(u_in, {}, config_.injected_wall_v1);
  const double lambda = u.lambda;
  std::array<GridFunction, kNumComponents> d1, d2;
  for (int c = 0; c < kNumComponents; ++c) {
    d1[static_cast<std::size_t>(c)] = diff(u[c], 1, grid_);
    d2[static_cast<std::size_t>(c)] = diff(u[c], 2, grid_);
  }
  // In-plane induction in curl form, H_t = (D2 E, -D1 E) with E = v1 H2 - v2 H1,
  // so that D.H is invariant under the semi-discrete flow.
  GridFunction E(grid_);
  for (int i = -grid_.ghost; i < grid_.n1 + grid_.ghost; ++i)
    for (int j = 0; j < grid_.n2; ++j) E(i, j) = u[kV1](i, j) * u[kH2](i, j) - u[kV2](i, j) * u[kH1](i, j);
  const GridFunction dE1 = diff(E, 1, grid_);
  const GridFunction dE2 = diff(E, 2, grid_);

  StateField out = dissipation(u);
  for (int i = 0; i < grid_.n1; ++i) {
    for (int j = 0; j < grid_.n2; ++j) {
      const NodeState s = NodeState::from(u, i, j);
      const NodeCoefficients k = node_coefficients(s, lambda, law_);
      const Cholesky7 chol(assemble_A0(s, k, lambda));
      Vec7 r = apply_Aj(s, k, 1, lambda, column(d1, i, j), lambda);
      const Vec7 r2 = apply_Aj(s, k, 2, lambda, column(d2, i, j), lambda);
      for (std::size_t c = 0; c < 7; ++c) r[c] += r2[c];
      Vec7 t = chol.solve(r);
      // t holds minus the tendency. Swap in the curl form for H1, H2 and keep
      // p_t = (q_t - H.H_t / lambda) / lambda unchanged.
      const double th1 = -dE2(i, j), th2 = dE1(i, j);
      t[kQ] += (s.H[0] * (th1 - t[kH1]) + s.H[1] * (th2 - t[kH2])) / lambda;
      t[kH1] = th1;
      t[kH2] = th2;
      for (int c = 0; c < kNumComponents; ++c) {
        const double v = out[c](i, j) - t[static_cast<std::size_t>(c)];
        if (!std::isfinite(v)) {
          std::ostringstream os;
          os << "non-finite tendency in " << kComponentNames[static_cast<std::size_t>(c)] << " at node (" << i
             << ", " << j << ")";
          throw SolverError(os.str());
        }
        out[c](i, j) = v;
      }
    }
  }
  for (int j = 0; j < grid_.n2; ++j) {
    for (int i : {0, grid_.n1 - 1}) {
      out[kV1](i, j) = 0.0;
      out[kH1](i, j) = 0.0;
    }
  }
  return out;
}

void CompressibleModel::impose_walls(StateField& u) const {
  for (int j = 0; j < grid_.n2; ++j) {
    for (int i : {0, grid_.n1 - 1}) {
      u[kV1](i, j) = config_.injected_wall_v1;
      u[kH1](i, j) = 0.0;
    }
  }
  fill_ghosts(u, {}, config_.injected_wall_v1);
}

StateField CompressibleModel::step_ssprk3(const StateField& u, double dt) const { return step_ssprk3(u, rhs(u), dt); }

StateField CompressibleModel::step_ssprk3(const StateField& u, const StateField& rhs_u, double dt) const {
  StateField u1 = u;
  axpy(dt, rhs_u, u1);
  impose_walls(u1);
  StateField u2 = combine(0.75, u, 0.25, u1, dt, rhs(u1));
  impose_walls(u2);
  StateField u3 = combine(1.0 / 3.0, u, 2.0 / 3.0, u2, dt, rhs(u2));
  impose_walls(u3);
  return u3;
}

double CompressibleModel::energy(const StateField& u) const {
  double e = 0.0;
  for (int i = 0; i < grid_.n1; ++i) {
    for (int j = 0; j < grid_.n2; ++j) {
      const NodeState s = NodeState::from(u, i, j);
      const Vec7 x = s.as_vector();
      e += grid_.weight(i) * dot(x, matvec(assemble_A0(s, u.lambda, law_), x));
    }
  }
  return e;
}

EnergyTerms CompressibleModel::energy_terms(const StateField& u_in, const StateField& u_t) const {
  const StateField u = apply_ghost_fill(u_in, {}, config_.injected_wall_v1);
  const double lambda = u.lambda;
  EnergyTerms t;
  const MatrixField div = div_A_bar(u, u_t, grid_, law_, config_.injected_wall_v1);
  const StateField diss = dissipation(u);
  for (int i = 0; i < grid_.n1; ++i) {
    for (int j = 0; j < grid_.n2; ++j) {
      const NodeState s = NodeState::from(u, i, j);
      const Vec7 x = s.as_vector();
      const Vec7 a0x = matvec(assemble_A0(s, u.lambda, law_), x);
      t.energy += grid_.weight(i) * dot(x, a0x);
      t.transport += grid_.weight(i) * dot(x, matvec(div(i, j), x));
      t.sink += 2.0 * grid_.weight(i) * dot(a0x, column(diss.comp, i, j));
    }
  }
  for (int j = 0; j < grid_.n2; ++j) {
    for (int i : {0, grid_.n1 - 1}) {
      const NodeState s = NodeState::from(u, i, j);
      const NodeCoefficients k = node_coefficients(s, lambda, law_);
      const Vec7 x = s.as_vector();
      const double flux = dot(x, apply_Aj(s, k, 1, lambda, x, lambda)) * grid_.dx2;
      t.boundary += (i == 0) ? flux : -flux;
    }
  }
  return t;
}

StateField rhs(const StateField& u, const Grid& grid, double lambda, double epsilon, const MaterialLaw& law) {
  SolverConfig cfg;
  cfg.lambda = lambda;
  cfg.epsilon = epsilon;
  StateField v = u;
  v.lambda = lambda;
  return CompressibleModel(grid, cfg, law).rhs(v);
}

double stable_dt(const StateField& u, const Grid& grid, double lambda, double cfl, const MaterialLaw& law) {
  SolverConfig cfg;
  cfg.lambda = lambda;
  cfg.cfl = cfl;
  StateField v = u;
  v.lambda = lambda;
  return CompressibleModel(grid, cfg, law).stable_dt(v);
}

void clean_divergence(StateField& u, Helmholtz& helmholtz) {
  const PlaneVector s = helmholtz.project_S(PlaneVector{u[kH1], u[kH2]});
  u[kH1] = s.c1;
  u[kH2] = s.c2;
  fill_ghosts(u[kH1], Parity::odd);
  fill_ghosts(u[kH2], Parity::even);
}

EnergyCheck energy_residual(const std::vector<TrajectorySample>& window, const CompressibleModel& model) {
  if (window.size() < 3) throw PreconditionError("energy_residual: need three samples");
  const TrajectorySample& s0 = window[window.size() - 3];
  const TrajectorySample& s1 = window[window.size() - 2];
  const TrajectorySample& s2 = window[window.size() - 1];
  const double h1 = s1.t - s0.t, h2 = s2.t - s1.t;
  if (!(h1 > 0.0 && h2 > 0.0)) throw PreconditionError("energy_residual: sample times must increase");
  const double e0 = model.energy(s0.u), e2 = model.energy(s2.u);
  const EnergyTerms terms = model.energy_terms(s1.u, s1.u_t);
  const double dE = -h2 / (h1 * (h1 + h2)) * e0 + (h2 - h1) / (h1 * h2) * terms.energy + h1 / (h2 * (h1 + h2)) * e2;
  EnergyCheck c;
  c.t = s1.t;
  c.energy = terms.energy;
  const double scale = terms.energy > 0.0 ? terms.energy : 1.0;
  c.residual = std::abs(dE - terms.transport - terms.sink) / scale;
  c.boundary_term = terms.boundary / scale;
  return c;
}

Trajectory run(const SolverConfig& config, const Grid& grid, const StateField& initial, const MaterialLaw& law,
               const std::function<void(const TrajectorySample&)>& on_output) {
  if (!(config.T > 0.0)) throw PreconditionError("T must be positive");
  if (!(config.output_dt > 0.0)) throw PreconditionError("output_dt must be positive");
  if (config.clean_every < 0 || config.energy_every < 0) throw PreconditionError("negative step interval");
  if (initial.n1() != grid.n1 || initial.n2() != grid.n2) throw PreconditionError("initial data do not match grid");
  // Initial data are cleaned when cleaning is on, so only the walls matter then.
  const CompatibilityReport report =
      check_compatibility(initial, grid, 1e-12, config.clean_every > 0 ? INFINITY : 1e-4);
  if (!report.ok()) {
    std::ostringstream os;
    os << "incompatible initial data: wall v1 " << report.max_wall_v1 << ", wall H1 " << report.max_wall_H1
       << ", div H " << report.max_div_H;
    throw PreconditionError(os.str());
  }

  CompressibleModel model(grid, config, law);
  Helmholtz helmholtz(grid);
  Trajectory traj;
  traj.config = config;
  traj.grid = grid;
  traj.eos_tag = law.tag;
  RunDiagnostics& diag = traj.diagnostics;

  StateField u = initial;
  u.lambda = config.lambda;
  model.impose_walls(u);
  model.set_sponge_reference(u);
  if (config.clean_every > 0) clean_divergence(u, helmholtz);

  std::vector<double> out_times;
  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * config.output_dt;
    if (t >= config.T * (1.0 - 1e-12)) break;
    out_times.push_back(t);
  }
  out_times.push_back(config.T);
  std::size_t next_out = 0;

  double t = 0.0;
  double div_since_output = max_abs(divergence(u[kH1], u[kH2], grid));
  diag.max_div_H = div_since_output;
  // Window of (t, u, rhs(u)) used by the energy monitor.
  std::vector<TrajectorySample> window;
  const int ee = config.energy_every;
  long n = 0;

  const auto emit = [&](const StateField& state, const StateField& tend) {
    TrajectorySample s;
    s.t = t;
    s.div_H = div_since_output;
    if (config.store_states) {
      s.u = state;
      s.u_t = tend;
    }
    if (on_output) {
      if (!config.store_states) {
        s.u = state;
        s.u_t = tend;
      }
      on_output(s);
      if (!config.store_states) {
        s.u = StateField();
        s.u_t = StateField();
      }
    }
    traj.samples.push_back(std::move(s));
    div_since_output = 0.0;
  };

  try {
    while (true) {
      StateField L = model.rhs(u);
      if (next_out < out_times.size() && t >= out_times[next_out]) {
        emit(u, L);
        ++next_out;
      }
      if (ee > 0) {
        const long phase = n % ee;
        const long mid = std::max(1, ee / 2);
        if (phase == mid - 1) {
          window.assign(1, TrajectorySample{t, u, L, 0.0});
        } else if ((phase == mid || phase == mid + 1) && !window.empty()) {
          window.push_back(TrajectorySample{t, u, L, 0.0});
          if (window.size() == 3) {
            const EnergyCheck c = energy_residual(window, model);
            diag.energy_checks.push_back(c);
            diag.max_energy_residual = std::max(diag.max_energy_residual, c.residual);
            window.clear();
          }
        }
      }
      if (next_out >= out_times.size()) break;
      if (n >= config.max_steps) throw SolverError("step limit reached");

      double dt = model.stable_dt(u);
      const double target = out_times[next_out];
      bool hit = false;
      if (t + dt >= target) {
        dt = target - t;
        hit = true;
      }
      u = model.step_ssprk3(u, L, dt);
      t = hit ? target : t + dt;
      ++n;

      const double div = max_abs(divergence(u[kH1], u[kH2], grid));
      diag.max_div_H = std::max(diag.max_div_H, div);
      div_since_output = std::max(div_since_output, div);
      if (config.clean_every > 0 && n % config.clean_every == 0) clean_divergence(u, helmholtz);
    }
  } catch (const HyperbolicityError& e) {
    diag.blew_up = true;
    diag.blowup_time = t;
    diag.failure = e.what();
  } catch (const SolverError& e) {
    diag.blew_up = true;
    diag.blowup_time = t;
    diag.failure = e.what();
  }
  diag.steps = n;
  diag.final_time = t;
  return traj;
}

double wall_normal_pressure_gradient(const StateField& u, const Grid& grid) {
  const GridFunction d = diff(u[kQ], 1, grid, DiffMode::one_sided);
  double m = 0.0;
  for (int j = 0; j < grid.n2; ++j) m = std::max(m, std::abs(d(0, j)));
  return m;
}

GridFunction normal_velocity_identity_residual(const StateField& u_in, const StateField& u_t, const Grid& grid,
                                               const MaterialLaw& law) {
  const StateField u = apply_ghost_fill(u_in);
  const double lambda = u.lambda;
  std::array<GridFunction, kNumComponents> d1, d2;
  for (int c = 0; c < kNumComponents; ++c) {
    d1[static_cast<std::size_t>(c)] = diff(u[c], 1, grid);
    d2[static_cast<std::size_t>(c)] = diff(u[c], 2, grid);
  }
  GridFunction out(grid);
  for (int i = 0; i < grid.n1; ++i) {
    for (int j = 0; j < grid.n2; ++j) {
      const NodeState s = NodeState::from(u, i, j);
      const NodeCoefficients k = node_coefficients(s, lambda, law);
      const auto material = [&](int c) {
        const auto C = static_cast<std::size_t>(c);
        return u_t[c](i, j) + s.v[0] * d1[C](i, j) + s.v[1] * d2[C](i, j);
      };
      double hH = 0.0;
      for (int c = 0; c < 3; ++c) hH += s.H[static_cast<std::size_t>(c)] / lambda * material(kH1 + c);
      out(i, j) = d1[kV1](i, j) + d2[kV2](i, j) + k.a / lambda * (material(kQ) - hH);
    }
  }
  return out;
}

}  // namespace mhdlab
