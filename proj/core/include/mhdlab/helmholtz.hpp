#pragma once

#include <memory>
#include <vector>

#include "mhdlab/grid.hpp"

namespace mhdlab {

/// Neumann problem  D1 D1 phi + D2 D2 phi = rhs  on the slab, with
/// d1 phi = wall_flux_lo at x1 = 0 and wall_flux_hi at x1 = L1 (one value
/// per x2 node; empty means zero), periodic in x2.
struct PoissonProblem {
  GridFunction rhs;
  std::vector<double> wall_flux_lo;
  std::vector<double> wall_flux_hi;
  double tolerance = 1e-10;           ///< relative residual bound
  double compatibility_threshold = 1e-3;  ///< relative mean defect accepted by the mean correction
  /// Magnitude that relative checks are measured against when it exceeds
  /// max |rhs| (a right side that is pure rounding noise).
  double reference_scale = 0.0;
};

/// In-plane vector field (x1 and x2 components).
struct PlaneVector {
  GridFunction c1;
  GridFunction c2;
};

/// Helmholtz decomposition on one grid. The discrete Laplacian is D.G with
/// D, G the 4th-order central divergence and gradient under wall parity, so
/// P_G = G (D G)^+ D is an exact orthogonal projector in the trapezoid inner
/// product. Diagonalized by a cosine transform in x1 and a real DFT in x2.
///
/// Not thread-safe; use one instance per thread.
class Helmholtz {
 public:
  explicit Helmholtz(const Grid& grid);
  ~Helmholtz();
  Helmholtz(const Helmholtz&) = delete;
  Helmholtz& operator=(const Helmholtz&) = delete;
  Helmholtz(Helmholtz&&) noexcept;
  Helmholtz& operator=(Helmholtz&&) noexcept;

  const Grid& grid() const;

  /// Zero-mean potential. Throws SolverError when the residual misses the
  /// tolerance or the data are incompatible beyond the mean correction.
  GridFunction solve_poisson_neumann(const PoissonProblem& problem);

  /// Gradient with ghosts filled from even parity.
  PlaneVector gradient(const GridFunction& phi) const;

  PlaneVector project_G(const PlaneVector& v);
  PlaneVector project_S(const PlaneVector& v);

  /// Relative residual of the last solve.
  double last_residual() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Free-function forms that build a temporary solver.
GridFunction solve_poisson_neumann(const PoissonProblem& problem, const Grid& grid);
PlaneVector project_S(const PlaneVector& v, const Grid& grid);
PlaneVector project_G(const PlaneVector& v, const Grid& grid);

/// Trapezoid-in-x1 inner product of two in-plane fields.
double inner(const PlaneVector& a, const PlaneVector& b, const Grid& grid);
double inner(const GridFunction& a, const GridFunction& b, const Grid& grid);

}  // namespace mhdlab
