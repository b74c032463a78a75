#pragma once

#include <array>
#include <functional>
#include <vector>

#include "mhdlab/grid.hpp"
#include "mhdlab/helmholtz.hpp"
#include "mhdlab/state.hpp"

namespace mhdlab {

/// Limit state: velocity w, magnetic field B (three components each, no x3
/// dependence) and the pressure pi, normalized to zero mean.
struct IncompressibleState {
  std::array<GridFunction, 3> w;
  std::array<GridFunction, 3> B;
  GridFunction pi;

  IncompressibleState() = default;
  explicit IncompressibleState(const Grid& grid);

  /// Velocity and magnetic parts of a compressible state (q dropped).
  static IncompressibleState from(const StateField& u);
};

struct IncompressibleConfig {
  double cfl = 0.8;
  double epsilon = 0.02;
  double T = 0.5;
  double output_dt = 0.005;
  bool store_states = true;
  long max_steps = 50'000'000;
};

struct IncompressibleSample {
  double t = 0.0;
  IncompressibleState state;  ///< pi filled in
};

struct IncompressibleTrajectory {
  std::vector<IncompressibleSample> samples;
  IncompressibleConfig config;
  Grid grid;
  double rho_bar = 1.0;
  long steps = 0;
  double max_div_w = 0.0;
  double max_div_B = 0.0;
};

class IncompressibleModel {
 public:
  IncompressibleModel(const Grid& grid, const IncompressibleConfig& config,
                      const MaterialLaw& law = MaterialLaw::exponential());

  const Grid& grid() const { return grid_; }
  double rho_bar() const { return rho_bar_; }

  /// w_t = P_S(-(w.D)w + (B.D)B / rho_bar) + dissipation, B_t = -(w.D)B + (B.D)w
  /// with the in-plane part written as a discrete curl. pi is not touched.
  IncompressibleState rhs(const IncompressibleState& s);

  double stable_dt(const IncompressibleState& s) const;

  /// SSPRK3 with the in-plane velocity projected after every stage.
  IncompressibleState step(const IncompressibleState& s, double dt);

  /// grad(pi + |B|^2 / 2) = P_G(-rho_bar (w.D)w + (B.D)B); also sets s.pi.
  PlaneVector total_pressure_gradient(IncompressibleState& s);

  void project_velocity(IncompressibleState& s);

  /// int (rho_bar |w|^2 + |B|^2) / 2.
  double energy(const IncompressibleState& s) const;

 private:
  Grid grid_;
  IncompressibleConfig config_;
  double rho_bar_ = 1.0;
  Helmholtz helmholtz_;
};

/// Free-function forms.
IncompressibleState rhs_incompressible(const IncompressibleState& s, const Grid& grid,
                                       const MaterialLaw& law = MaterialLaw::exponential(), double epsilon = 0.0);
PlaneVector recover_total_pressure_gradient(const IncompressibleState& s, const Grid& grid,
                                            const MaterialLaw& law = MaterialLaw::exponential());

/// Starts from P_S w0 (and P_S B0) and integrates to config.T.
IncompressibleTrajectory run_incompressible(const IncompressibleConfig& config, const Grid& grid,
                                            const IncompressibleState& initial,
                                            const MaterialLaw& law = MaterialLaw::exponential(),
                                            const std::function<void(const IncompressibleSample&)>& on_output = {});

}  // namespace mhdlab
