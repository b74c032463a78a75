#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "mhdlab/flux.hpp"
#include "mhdlab/grid.hpp"
#include "mhdlab/helmholtz.hpp"
#include "mhdlab/state.hpp"

namespace mhdlab {

/// Absorbing layer next to the far wall: the q and v1 tendencies get
/// -s(x1) (q - q_ref) and -s(x1) (v1 - v1_ref) with s ramping smoothly from
/// 0 at start * L1 to strength * lambda * sqrt(mu1 mu2) / width at the wall.
/// Equal rates damp both x1 characteristics q +- v1 alike, so the ramp
/// hardly reflects. The references are the initial values. strength = 0
/// disables it.
struct Sponge {
  double start = 0.8;
  double strength = 0.0;
};

struct SolverConfig {
  double lambda = 1.0;
  double cfl = 0.8;
  /// Hyperdissipation coefficient. q is damped at epsilon * max_signal_speed,
  /// the other components at epsilon * max_transport_speed.
  double epsilon = 0.02;
  double T = 0.5;
  int clean_every = 10;   ///< steps between divergence cleanings; 0 disables
  double output_dt = 0.005;
  int energy_every = 10;  ///< steps between energy-identity checks; 0 disables
  Sponge sponge;
  /// Wall value forced on v1 at both walls. Nonzero only to demonstrate that
  /// the energy residual picks up the boundary flux.
  double injected_wall_v1 = 0.0;
  bool store_states = true;
  long max_steps = 50'000'000;
};

struct TrajectorySample {
  double t = 0.0;
  StateField u;
  StateField u_t;  ///< semi-discrete time derivative from the right side
  double div_H = 0.0;  ///< max ||D.H||_inf over the steps since the previous sample, before cleaning
};

struct EnergyCheck {
  double t = 0.0;
  double residual = 0.0;       ///< |dE/dt - DivA term - sink| / E
  double boundary_term = 0.0;  ///< wall flux of (A1 + lambda C1) u.u over E
  double energy = 0.0;
};

struct RunDiagnostics {
  long steps = 0;
  double final_time = 0.0;
  double max_div_H = 0.0;  ///< max over steps of ||D.H||_inf, measured before cleaning
  double max_energy_residual = 0.0;
  std::vector<EnergyCheck> energy_checks;
  bool blew_up = false;
  double blowup_time = -1.0;
  std::string failure;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  SolverConfig config;
  Grid grid;
  std::string eos_tag;
  RunDiagnostics diagnostics;
};

/// Terms of the discrete energy balance at one state.
struct EnergyTerms {
  double energy = 0.0;          ///< sum w u.A0 u
  double transport = 0.0;       ///< sum w u.(Div A) u
  double sink = 0.0;            ///< 2 sum w u.A0 (dissipative tendency)
  double boundary = 0.0;        ///< int_{x1=0} (A1+lC1)u.u - int_{x1=L1} (A1+lC1)u.u
};

/// Semi-discrete model: right side, time step, and diagnostics for one
/// (grid, law, config).
class CompressibleModel {
 public:
  CompressibleModel(const Grid& grid, const SolverConfig& config, MaterialLaw law = MaterialLaw::exponential());

  const Grid& grid() const { return grid_; }
  const SolverConfig& config() const { return config_; }
  const MaterialLaw& law() const { return law_; }

  /// Target of the sponge relaxation of q and v1 (defaults to zero).
  void set_sponge_reference(const StateField& ref) {
    q_ref_ = ref[kQ];
    v1_ref_ = ref[kV1];
  }

  /// -A0^{-1} sum_j (A_j + lambda C_j) D_j u + dissipation; v1 and H1
  /// tendencies vanish at wall nodes. Throws HyperbolicityError / SolverError.
  StateField rhs(const StateField& u) const;
  /// Dissipative part of rhs alone (hyperdissipation + sponge).
  StateField dissipation(const StateField& u) const;

  double max_signal_speed(const StateField& u) const;
  /// max(|v| + |H| / sqrt(rho)), without the acoustic part.
  double max_transport_speed(const StateField& u) const;
  double stable_dt(const StateField& u) const;

  StateField step_ssprk3(const StateField& u, double dt) const;
  /// As step_ssprk3, reusing an already evaluated rhs(u).
  StateField step_ssprk3(const StateField& u, const StateField& rhs_u, double dt) const;

  void impose_walls(StateField& u) const;

  EnergyTerms energy_terms(const StateField& u, const StateField& u_t) const;
  double energy(const StateField& u) const;

 private:
  Grid grid_;
  SolverConfig config_;
  MaterialLaw law_;
  std::vector<double> sponge_rate_;  // per x1 node
  GridFunction q_ref_;
  GridFunction v1_ref_;
};

/// Right side without sponge (free-function form).
StateField rhs(const StateField& u, const Grid& grid, double lambda, double epsilon,
               const MaterialLaw& law = MaterialLaw::exponential());

/// cfl min(dx) / (max(|v| + |H|/sqrt(rho)) + 1.5 lambda sqrt(mu1 mu2)).
double stable_dt(const StateField& u, const Grid& grid, double lambda, double cfl,
                 const MaterialLaw& law = MaterialLaw::exponential());

/// H <- H - G phi with D G phi = D.H (H3 untouched).
void clean_divergence(StateField& u, Helmholtz& helmholtz);

/// Energy-identity residual from three consecutive samples (centred,
/// nonuniform time difference at the middle one). Throws PreconditionError
/// with fewer than three samples.
EnergyCheck energy_residual(const std::vector<TrajectorySample>& window, const CompressibleModel& model);

/// Integrates to config.T. Hyperbolicity loss and NaNs are recorded in the
/// diagnostics (the partial trajectory is returned). Throws PreconditionError
/// for incompatible initial data.
Trajectory run(const SolverConfig& config, const Grid& grid, const StateField& initial,
               const MaterialLaw& law = MaterialLaw::exponential(),
               const std::function<void(const TrajectorySample&)>& on_output = {});

/// max over x2 of |one-sided D1 q| at x1 = 0.
double wall_normal_pressure_gradient(const StateField& u, const Grid& grid);

/// D1 v1 minus its expression through the q equation:
/// -D2 v2 - (a / lambda) ((d_t + v.D) q - (H / lambda).(d_t + v.D) H).
GridFunction normal_velocity_identity_residual(const StateField& u, const StateField& u_t, const Grid& grid,
                                               const MaterialLaw& law = MaterialLaw::exponential());

}  // namespace mhdlab
