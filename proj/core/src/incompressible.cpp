#include "mhdlab/incompressible.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "mhdlab/error.hpp"

namespace mhdlab {

namespace {

constexpr std::array<Parity, 3> kVectorParity{Parity::odd, Parity::even, Parity::even};

void fill_all(IncompressibleState& s) {
  for (int c = 0; c < 3; ++c) {
    fill_ghosts(s.w[static_cast<std::size_t>(c)], kVectorParity[static_cast<std::size_t>(c)]);
    fill_ghosts(s.B[static_cast<std::size_t>(c)], kVectorParity[static_cast<std::size_t>(c)]);
  }
}

// u <- a u + b (v + dt L) componentwise on w and B.
IncompressibleState combine(double a, const IncompressibleState& u, double b, const IncompressibleState& v,
                            double dt, const IncompressibleState& L) {
  IncompressibleState out = v;
  for (int c = 0; c < 3; ++c) {
    const auto C = static_cast<std::size_t>(c);
    for (auto [dst, src, tend] : {std::tuple{&out.w[C], &u.w[C], &L.w[C]}, std::tuple{&out.B[C], &u.B[C], &L.B[C]}}) {
      auto& d = dst->storage();
      const auto& s = src->storage();
      const auto& t = tend->storage();
      for (std::size_t k = 0; k < d.size(); ++k) d[k] = a * s[k] + b * (d[k] + dt * t[k]);
    }
  }
  return out;
}

void zero_wall_normal(IncompressibleState& s, const Grid& g) {
  for (int j = 0; j < g.n2; ++j) {
    for (int i : {0, g.n1 - 1}) {
      s.w[0](i, j) = 0.0;
      s.B[0](i, j) = 0.0;
    }
  }
}

double max_speed(const IncompressibleState& s, double rho_bar) {
  double m = 0.0;
  const double inv = 1.0 / std::sqrt(rho_bar);
  for (int i = 0; i < s.w[0].n1(); ++i) {
    for (int j = 0; j < s.w[0].n2(); ++j) {
      double w2 = 0.0, b2 = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        w2 += s.w[c](i, j) * s.w[c](i, j);
        b2 += s.B[c](i, j) * s.B[c](i, j);
      }
      m = std::max(m, std::sqrt(w2) + std::sqrt(b2) * inv);
    }
  }
  return m;
}

// (a.D) f with a the in-plane part of a, derivatives precomputed.
double advect(const std::array<GridFunction, 3>& a, const GridFunction& d1, const GridFunction& d2, int i, int j) {
  return a[0](i, j) * d1(i, j) + a[1](i, j) * d2(i, j);
}

}  // namespace

IncompressibleState::IncompressibleState(const Grid& grid)
    : w{GridFunction(grid), GridFunction(grid), GridFunction(grid)},
      B{GridFunction(grid), GridFunction(grid), GridFunction(grid)},
      pi(grid) {}

IncompressibleState IncompressibleState::from(const StateField& u) {
  IncompressibleState s;
  s.w = {u[kV1], u[kV2], u[kV3]};
  s.B = {u[kH1], u[kH2], u[kH3]};
  s.pi = GridFunction(u.n1(), u.n2(), u[0].ghost());
  return s;
}

IncompressibleModel::IncompressibleModel(const Grid& grid, const IncompressibleConfig& config, const MaterialLaw& law)
    : grid_(grid), config_(config), rho_bar_(law.rho_bar()), helmholtz_(grid) {
  if (!(config.cfl > 0.0)) throw PreconditionError("cfl must be positive");
  if (config.epsilon < 0.0) throw PreconditionError("epsilon must be non-negative");
  if (!(rho_bar_ > 0.0)) throw PreconditionError("rho_bar must be positive");
}

void IncompressibleModel::project_velocity(IncompressibleState& s) {
  const PlaneVector p = helmholtz_.project_S(PlaneVector{s.w[0], s.w[1]});
  s.w[0] = p.c1;
  s.w[1] = p.c2;
}

IncompressibleState IncompressibleModel::rhs(const IncompressibleState& s_in) {
  IncompressibleState s = s_in;
  fill_all(s);
  const Grid& g = grid_;
  std::array<GridFunction, 3> dw1, dw2, dB1, dB2;
  for (std::size_t c = 0; c < 3; ++c) {
    dw1[c] = diff(s.w[c], 1, g);
    dw2[c] = diff(s.w[c], 2, g);
    dB1[c] = diff(s.B[c], 1, g);
    dB2[c] = diff(s.B[c], 2, g);
  }
  GridFunction E(g);
  for (int i = -g.ghost; i < g.n1 + g.ghost; ++i)
    for (int j = 0; j < g.n2; ++j) E(i, j) = s.w[0](i, j) * s.B[1](i, j) - s.w[1](i, j) * s.B[0](i, j);
  const GridFunction dE1 = diff(E, 1, g);
  const GridFunction dE2 = diff(E, 2, g);

  IncompressibleState out(g);
  const double coef = config_.epsilon * max_speed(s, rho_bar_);
  const auto dissipate = [&](const GridFunction& f, GridFunction& dst) {
    if (coef == 0.0) return;
    const GridFunction f1 = fourth_difference(f, 1);
    const GridFunction f2 = fourth_difference(f, 2);
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) dst(i, j) -= coef * (f1(i, j) / g.dx1 + f2(i, j) / g.dx2);
  };
  for (std::size_t c = 0; c < 3; ++c) {
    dissipate(s.w[c], out.w[c]);
    dissipate(s.B[c], out.B[c]);
  }

  const double inv_rho = 1.0 / rho_bar_;
  for (int i = 0; i < g.n1; ++i) {
    for (int j = 0; j < g.n2; ++j) {
      for (std::size_t c = 0; c < 3; ++c) {
        out.w[c](i, j) += -advect(s.w, dw1[c], dw2[c], i, j) + inv_rho * advect(s.B, dB1[c], dB2[c], i, j);
      }
      out.B[0](i, j) += dE2(i, j);
      out.B[1](i, j) -= dE1(i, j);
      out.B[2](i, j) += -advect(s.w, dB1[2], dB2[2], i, j) + advect(s.B, dw1[2], dw2[2], i, j);
    }
  }
  zero_wall_normal(out, g);
  project_velocity(out);
  for (std::size_t c = 0; c < 3; ++c) {
    for (double v : out.w[c].storage())
      if (!std::isfinite(v)) throw SolverError("non-finite velocity tendency");
    for (double v : out.B[c].storage())
      if (!std::isfinite(v)) throw SolverError("non-finite magnetic tendency");
  }
  return out;
}

double IncompressibleModel::stable_dt(const IncompressibleState& s) const {
  const double m = max_speed(s, rho_bar_);
  if (m == 0.0) return INFINITY;
  return config_.cfl * std::min(grid_.dx1, grid_.dx2) / m;
}

IncompressibleState IncompressibleModel::step(const IncompressibleState& s, double dt) {
  const auto finish = [&](IncompressibleState& u) {
    zero_wall_normal(u, grid_);
    project_velocity(u);
    fill_all(u);
  };
  IncompressibleState u1 = combine(0.0, s, 1.0, s, dt, rhs(s));
  finish(u1);
  IncompressibleState u2 = combine(0.75, s, 0.25, u1, dt, rhs(u1));
  finish(u2);
  IncompressibleState u3 = combine(1.0 / 3.0, s, 2.0 / 3.0, u2, dt, rhs(u2));
  finish(u3);
  u3.pi = s.pi;
  return u3;
}

PlaneVector IncompressibleModel::total_pressure_gradient(IncompressibleState& s_io) {
  IncompressibleState s = s_io;
  fill_all(s);
  const Grid& g = grid_;
  GridFunction f1(g), f2(g);
  std::array<GridFunction, 2> dw1, dw2, dB1, dB2;
  for (std::size_t c = 0; c < 2; ++c) {
    dw1[c] = diff(s.w[c], 1, g);
    dw2[c] = diff(s.w[c], 2, g);
    dB1[c] = diff(s.B[c], 1, g);
    dB2[c] = diff(s.B[c], 2, g);
  }
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      f1(i, j) = -rho_bar_ * advect(s.w, dw1[0], dw2[0], i, j) + advect(s.B, dB1[0], dB2[0], i, j);
      f2(i, j) = -rho_bar_ * advect(s.w, dw1[1], dw2[1], i, j) + advect(s.B, dB1[1], dB2[1], i, j);
    }
  // Normal momentum trace: f1 = 0 at the walls, so the Neumann data are homogeneous.
  PoissonProblem prob;
  prob.rhs = divergence(f1, f2, g);
  prob.reference_scale = std::max(max_abs(f1), max_abs(f2)) / std::min(g.dx1, g.dx2);
  prob.tolerance = 1e-9;
  const GridFunction total = helmholtz_.solve_poisson_neumann(prob);

  GridFunction pi(g);
  double mean = 0.0, area = 0.0;
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      double b2 = 0.0;
      for (std::size_t c = 0; c < 3; ++c) b2 += s.B[c](i, j) * s.B[c](i, j);
      pi(i, j) = total(i, j) - 0.5 * b2;
      mean += g.weight(i) * pi(i, j);
      area += g.weight(i);
    }
  mean /= area;
  for (int i = 0; i < g.n1; ++i)
    for (double& v : pi.row(i)) v -= mean;
  fill_ghosts(pi, Parity::even);
  s_io.pi = pi;
  return helmholtz_.gradient(total);
}

double IncompressibleModel::energy(const IncompressibleState& s) const {
  double e = 0.0;
  for (int i = 0; i < grid_.n1; ++i)
    for (int j = 0; j < grid_.n2; ++j) {
      double w2 = 0.0, b2 = 0.0;
      for (std::size_t c = 0; c < 3; ++c) {
        w2 += s.w[c](i, j) * s.w[c](i, j);
        b2 += s.B[c](i, j) * s.B[c](i, j);
      }
      e += grid_.weight(i) * 0.5 * (rho_bar_ * w2 + b2);
    }
  return e;
}

IncompressibleState rhs_incompressible(const IncompressibleState& s, const Grid& grid, const MaterialLaw& law,
                                       double epsilon) {
  IncompressibleConfig cfg;
  cfg.epsilon = epsilon;
  IncompressibleModel model(grid, cfg, law);
  return model.rhs(s);
}

PlaneVector recover_total_pressure_gradient(const IncompressibleState& s, const Grid& grid, const MaterialLaw& law) {
  IncompressibleModel model(grid, IncompressibleConfig{}, law);
  IncompressibleState copy = s;
  return model.total_pressure_gradient(copy);
}

IncompressibleTrajectory run_incompressible(const IncompressibleConfig& config, const Grid& grid,
                                            const IncompressibleState& initial, const MaterialLaw& law,
                                            const std::function<void(const IncompressibleSample&)>& on_output) {
  if (!(config.T > 0.0)) throw PreconditionError("T must be positive");
  if (!(config.output_dt > 0.0)) throw PreconditionError("output_dt must be positive");
  if (initial.w[0].n1() != grid.n1 || initial.w[0].n2() != grid.n2) {
    throw PreconditionError("initial data do not match grid");
  }
  IncompressibleModel model(grid, config, law);
  IncompressibleTrajectory traj;
  traj.config = config;
  traj.grid = grid;
  traj.rho_bar = model.rho_bar();

  // Limit initial datum: solenoidal parts of w0 and B0.
  IncompressibleState u = initial;
  zero_wall_normal(u, grid);
  model.project_velocity(u);
  {
    Helmholtz h(grid);
    const PlaneVector b = h.project_S(PlaneVector{u.B[0], u.B[1]});
    u.B[0] = b.c1;
    u.B[1] = b.c2;
  }
  fill_all(u);

  std::vector<double> out_times;
  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * config.output_dt;
    if (t >= config.T * (1.0 - 1e-12)) break;
    out_times.push_back(t);
  }
  out_times.push_back(config.T);

  const auto monitor = [&](const IncompressibleState& s) {
    traj.max_div_w = std::max(traj.max_div_w, max_abs(divergence(s.w[0], s.w[1], grid)));
    traj.max_div_B = std::max(traj.max_div_B, max_abs(divergence(s.B[0], s.B[1], grid)));
  };

  double t = 0.0;
  long n = 0;
  for (std::size_t next = 0; next < out_times.size();) {
    if (t >= out_times[next]) {
      IncompressibleSample sample;
      sample.t = t;
      sample.state = u;
      model.total_pressure_gradient(sample.state);
      monitor(sample.state);
      if (on_output) on_output(sample);
      if (!config.store_states) sample.state = IncompressibleState();
      traj.samples.push_back(std::move(sample));
      ++next;
      continue;
    }
    if (n >= config.max_steps) throw SolverError("step limit reached");
    double dt = model.stable_dt(u);
    bool hit = false;
    if (t + dt >= out_times[next]) {
      dt = out_times[next] - t;
      hit = true;
    }
    u = model.step(u, dt);
    t = hit ? out_times[next] : t + dt;
    ++n;
  }
  traj.steps = n;
  return traj;
}

}  // namespace mhdlab
