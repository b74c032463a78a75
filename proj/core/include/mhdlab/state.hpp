#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include "mhdlab/grid.hpp"

namespace mhdlab {

/// Component order of the 7-vector unknown.
enum Component : int { kQ = 0, kV1, kV2, kV3, kH1, kH2, kH3 };
inline constexpr int kNumComponents = 7;
inline constexpr std::array<const char*, kNumComponents> kComponentNames = {"q",  "v1", "v2", "v3",
                                                                            "H1", "H2", "H3"};

struct ParityTable {
  std::array<Parity, kNumComponents> at_wall{Parity::even, Parity::odd,  Parity::even, Parity::even,
                                             Parity::odd,  Parity::even, Parity::even};
};

/// u = (q, v, H) on the grid, plus the stiffness parameter.
struct StateField {
  std::array<GridFunction, kNumComponents> comp;
  double lambda = 1.0;

  StateField() = default;
  StateField(const Grid& grid, double lam);

  GridFunction& operator[](int c) { return comp[static_cast<std::size_t>(c)]; }
  const GridFunction& operator[](int c) const { return comp[static_cast<std::size_t>(c)]; }
  int n1() const { return comp[0].n1(); }
  int n2() const { return comp[0].n2(); }
};

/// Fills ghost rows of every component. `wall_v1` != 0 injects a boundary
/// violation for v1 (diagnostic use only).
StateField apply_ghost_fill(StateField field, const ParityTable& parity = {}, double wall_v1 = 0.0);
void fill_ghosts(StateField& field, const ParityTable& parity = {}, double wall_v1 = 0.0);

/// y += a * x componentwise.
void axpy(double a, const StateField& x, StateField& y);
double max_abs(const StateField& f);

/// Barotropic law rho(p). Admissible range is |p| <= max_abs_pressure with
/// rho > 0 and rho_p > 0.
struct MaterialLaw {
  std::string tag;
  std::function<double(double)> rho;
  std::function<double(double)> rho_p;
  std::function<double(double)> rho_pp;
  double max_abs_pressure = 10.0;

  double rho_bar() const { return rho(0.0); }
  double rho_p_bar() const { return rho_p(0.0); }
  double mu1() const { return rho_bar() / rho_p_bar(); }
  double mu2() const { return 1.0 / rho_bar(); }

  /// (rho(p), rho_p(p)); throws HyperbolicityError outside the admissible range.
  std::pair<double, double> eos(double p) const;

  /// rho = exp(p).
  static MaterialLaw exponential();
  /// rho = rho0 + slope * p, admissible while rho0 + slope * p > 0.
  static MaterialLaw affine(double rho0, double slope);
  /// "exp" or "affine:<rho0>:<slope>".
  static MaterialLaw from_tag(const std::string& tag);
};

double p_to_q(double p, const std::array<double, 3>& H, double lambda);
double q_to_p(double q, const std::array<double, 3>& H, double lambda);

enum class DataKind { well_prepared, ill_prepared };

/// Stream-function initial data. Vortical parts are psi = chi(x1) g(x2) with
/// chi = C (xi (1 - xi))^r on xi = x1 / support in [0, 1] and zero beyond,
/// so chi vanishes to order r at the wall and at x1 = support.
struct DataFamily {
  DataKind kind = DataKind::ill_prepared;
  double amp_v = 0.5;       ///< peak of the vortical velocity stream function
  double amp_H = 0.3;       ///< peak of the magnetic stream function
  double amp_v3 = 0.1;      ///< out-of-plane velocity
  double amp_H3 = 0.1;      ///< out-of-plane magnetic field
  double amp_phi = 0.5;     ///< peak of the gradient pulse (ill-prepared only)
  double amp_q = 0.0;       ///< O(1) pressure bump (ill-prepared only)
  double support = 0.6;     ///< x1 extent of the vortical parts, as a fraction of L1
  double pulse_center = 0.25;  ///< gradient pulse centre, fraction of L1
  double pulse_width = 0.12;   ///< gradient pulse half-width, fraction of L1
  int mode_v = 1;           ///< x2 wavenumber index of the velocity stream function
  int mode_H = 1;           ///< x2 wavenumber index of the magnetic stream function
  /// Wall vanishing order r of chi, must be >= 4. With odd r the parity
  /// reflections at the wall stay smooth and the discrete divergence of the
  /// data is 4th order; r = 4 drops it to 3rd.
  int vanishing_order = 5;
  std::uint64_t seed = 0;   ///< randomizes x2 phases and amplitude factors
};

/// Throws PreconditionError for invalid parameters (e.g. vanishing order < 4).
StateField make_initial_data(const DataFamily& family, const Grid& grid, double lambda,
                             const MaterialLaw& law = MaterialLaw::exponential());

/// Analytic gradient pulse v1 = d(phi)/dx1 used by the ill-prepared family,
/// and its exact L2 norm over the slab.
double gradient_pulse(const DataFamily& family, const Grid& grid, double x1);
double gradient_pulse_l2(const DataFamily& family, const Grid& grid);

struct CompatibilityReport {
  double max_wall_v1 = 0.0;
  double max_wall_H1 = 0.0;
  double max_div_H = 0.0;
  double wall_tolerance = 0.0;
  double div_tolerance = 0.0;
  bool ok() const {
    return max_wall_v1 <= wall_tolerance && max_wall_H1 <= wall_tolerance && max_div_H <= div_tolerance;
  }
};

CompatibilityReport check_compatibility(const StateField& state, const Grid& grid, double wall_tolerance = 1e-12,
                                        double div_tolerance = 1e-4);

/// Discrete divergence of the in-plane field (ghosts filled with wall parity).
GridFunction divergence(const GridFunction& f1, const GridFunction& f2, const Grid& grid);

}  // namespace mhdlab
