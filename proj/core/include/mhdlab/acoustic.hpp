#pragma once

#include <array>
#include <vector>

#include "mhdlab/grid.hpp"
#include "mhdlab/state.hpp"

namespace mhdlab {

/// (q, v) part of a state; v3 is carried along unchanged by the linear system.
struct AcousticField {
  GridFunction q;
  std::array<GridFunction, 3> v;

  AcousticField() = default;
  explicit AcousticField(const Grid& grid);
  static AcousticField from(const StateField& u);
};

/// Standing wave cos(kappa1 x1) cos(kappa2 x2) in q with kappa1 = pi k1 / L1,
/// kappa2 = 2 pi k2 / L2.
struct AcousticMode {
  int k1 = 1;
  int k2 = 0;
  double amplitude = 1.0;
  double lambda = 1.0;
  double mu1 = 1.0;
  double mu2 = 1.0;

  double frequency(const Grid& grid) const;
};

/// Exact solution of q_t + lambda mu1 div v = 0, v_t + lambda mu2 grad q = 0
/// starting from the pure-q profile:
///   q  = A cos(k.x-profile) cos(wt),
///   v  = A sqrt(mu2/mu1) (kappa / |kappa|) (sin/cos profiles) sin(wt).
AcousticField modal_solution(const AcousticMode& mode, const Grid& grid, double t);

/// Wavenumber used for each Fourier/cosine mode. `exact` uses the continuous
/// derivative; `discrete` uses the symbol of the 4th-order central difference,
/// so the evolution is the exact solution of the semi-discrete system and
/// commutes with the discrete Helmholtz projection.
enum class AcousticSymbol { exact, discrete };

/// Exact modal evolution of the linear acoustic system (cosine basis for q
/// and v2, sine basis for v1, Fourier in x2). Returns one field per entry of
/// `times`. Throws PreconditionError when v1 is nonzero at a wall.
std::vector<AcousticField> run_linear(const AcousticField& initial, const Grid& grid, double lambda, double mu1,
                                      double mu2, const std::vector<double>& times,
                                      AcousticSymbol symbol = AcousticSymbol::exact);

/// (1/2) int (q^2 / mu1 + |v|^2 / mu2) over x1 in [x1_lo, x1_hi] (trapezoid in
/// x1 on the nodes inside the window).
double acoustic_energy(const AcousticField& f, const Grid& grid, double mu1, double mu2, double x1_lo = 0.0,
                       double x1_hi = 1e300);

/// Initial-layer mechanism on the slab: the gradient pulse of `family`
/// evolved by run_linear, energy in x1 in [0, window * L1] sampled on
/// [0, return_time), where return_time is the first instant at which energy
/// reflected from the far wall can re-enter the window.
struct LayerDecayReport {
  double initial_energy = 0.0;
  double min_ratio = 1.0;   ///< min_t E_window(t) / E_window(0)
  double time_of_min = 0.0;
  double return_time = 0.0;
  double ps_drift = 0.0;    ///< max_t |P_S v(t) - P_S v(0)| / max |v(0)| for pulse plus vortical data
  std::vector<double> times;
  std::vector<double> ratios;
};

LayerDecayReport pulse_layer_decay(const DataFamily& family, const Grid& grid, double lambda,
                                   const MaterialLaw& law = MaterialLaw::exponential(), double window = 0.5,
                                   int samples = 64);

/// Right sides of the acoustic form q_t + lambda mu1 div v = G0,
/// v_t + lambda mu2 grad q = G, evaluated from a compressible state and its
/// time derivative.
struct ResidualTerms {
  GridFunction G0;
  std::array<GridFunction, 3> G;
};

ResidualTerms residual_terms(const StateField& u, const StateField& u_t, const Grid& grid,
                             const MaterialLaw& law = MaterialLaw::exponential());

}  // namespace mhdlab
