#include "mhdlab/helmholtz.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "fftw_support.hpp"
#include "mhdlab/error.hpp"
#include "mhdlab/state.hpp"

namespace mhdlab {

namespace {

using detail::planner_mutex;

double symbol(double theta) { return detail::difference_symbol(theta); }

GridFunction second_diff_x2(const GridFunction& f, const Grid& grid) { return diff(diff(f, 2, grid), 2, grid); }

// D1 D1 phi + D2 D2 phi for an even-extended phi.
GridFunction apply_laplacian(const GridFunction& phi, const Grid& grid) {
  GridFunction p = phi;
  fill_ghosts(p, Parity::even);
  GridFunction d1 = diff(p, 1, grid);
  fill_ghosts(d1, Parity::odd);
  GridFunction out = diff(d1, 1, grid);
  axpy(1.0, second_diff_x2(p, grid), out);
  return out;
}

double weighted_mean(const GridFunction& f, const Grid& grid) {
  double s = 0.0, w = 0.0;
  for (int i = 0; i < grid.n1; ++i)
    for (int j = 0; j < grid.n2; ++j) {
      s += grid.weight(i) * f(i, j);
      w += grid.weight(i);
    }
  return s / w;
}

}  // namespace

struct Helmholtz::Impl {
  Grid grid;
  double* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
  std::vector<double> inv_eig;  // 0 on null modes
  double last_residual = 0.0;

  explicit Impl(const Grid& g) : grid(g) {
    const int n1 = g.n1, n2 = g.n2;
    const std::size_t n = static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2);
    buf = static_cast<double*>(fftw_malloc(sizeof(double) * n));
    {
      std::lock_guard<std::mutex> lock(planner_mutex());
      fwd = fftw_plan_r2r_2d(n1, n2, buf, buf, FFTW_REDFT00, FFTW_R2HC, FFTW_ESTIMATE);
      bwd = fftw_plan_r2r_2d(n1, n2, buf, buf, FFTW_REDFT00, FFTW_HC2R, FFTW_ESTIMATE);
    }
    if (fwd == nullptr || bwd == nullptr) throw SolverError("FFTW planning failed");

    inv_eig.assign(n, 0.0);
    const double norm = 1.0 / (2.0 * (n1 - 1) * static_cast<double>(n2));
    for (int k1 = 0; k1 < n1; ++k1) {
      const double s1 = symbol(std::numbers::pi * k1 / (n1 - 1)) / g.dx1;
      const bool null1 = k1 == 0 || k1 == n1 - 1;
      for (int m = 0; m < n2; ++m) {
        const int kk = m <= n2 / 2 ? m : n2 - m;
        const bool null2 = kk == 0 || (n2 % 2 == 0 && kk == n2 / 2);
        if (null1 && null2) continue;
        const double s2 = symbol(2.0 * std::numbers::pi * kk / n2) / g.dx2;
        inv_eig[static_cast<std::size_t>(k1) * static_cast<std::size_t>(n2) + static_cast<std::size_t>(m)] =
            -norm / (s1 * s1 + s2 * s2);
      }
    }
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (buf) fftw_free(buf);
  }

  // Homogeneous-Neumann solve of L phi = rhs on the range of L.
  GridFunction solve_homogeneous(const GridFunction& rhs) {
    const int n1 = grid.n1, n2 = grid.n2;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) buf[static_cast<std::size_t>(i) * static_cast<std::size_t>(n2) + static_cast<std::size_t>(j)] = rhs(i, j);
    fftw_execute(fwd);
    for (std::size_t n = 0; n < inv_eig.size(); ++n) buf[n] *= inv_eig[n];
    fftw_execute(bwd);
    GridFunction phi(grid);
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j) phi(i, j) = buf[static_cast<std::size_t>(i) * static_cast<std::size_t>(n2) + static_cast<std::size_t>(j)];
    return phi;
  }

  // Removes the components of f along the null modes of L (constant and
  // grid-scale checkerboards); returns the removed mean.
  double remove_null_modes(GridFunction& f) const {
    const int n1 = grid.n1, n2 = grid.n2;
    double removed_mean = 0.0;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        if (b == 1 && n2 % 2 != 0) continue;
        const auto mode = [&](int i, int j) {
          const double s1 = (a == 1 && (i % 2 != 0)) ? -1.0 : 1.0;
          const double s2 = (b == 1 && (j % 2 != 0)) ? -1.0 : 1.0;
          return s1 * s2;
        };
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n1; ++i)
          for (int j = 0; j < n2; ++j) {
            num += grid.weight(i) * f(i, j) * mode(i, j);
            den += grid.weight(i);
          }
        const double c = num / den;
        if (a == 0 && b == 0) removed_mean = c;
        for (int i = 0; i < n1; ++i)
          for (int j = 0; j < n2; ++j) f(i, j) -= c * mode(i, j);
      }
    }
    return removed_mean;
  }
};

Helmholtz::Helmholtz(const Grid& grid) : impl_(std::make_unique<Impl>(grid)) {}
Helmholtz::~Helmholtz() = default;
Helmholtz::Helmholtz(Helmholtz&&) noexcept = default;
Helmholtz& Helmholtz::operator=(Helmholtz&&) noexcept = default;

const Grid& Helmholtz::grid() const { return impl_->grid; }
double Helmholtz::last_residual() const { return impl_->last_residual; }

GridFunction Helmholtz::solve_poisson_neumann(const PoissonProblem& problem) {
  const Grid& grid = impl_->grid;
  const int n1 = grid.n1, n2 = grid.n2;
  if (problem.rhs.n1() != n1 || problem.rhs.n2() != n2) throw PreconditionError("Poisson rhs has the wrong shape");
  const auto check_flux = [&](const std::vector<double>& f) {
    if (!f.empty() && f.size() != static_cast<std::size_t>(n2))
      throw PreconditionError("Poisson wall data must have one value per x2 node");
  };
  check_flux(problem.wall_flux_lo);
  check_flux(problem.wall_flux_hi);

  GridFunction rhs = problem.rhs;
  GridFunction lift(grid);
  const bool inhomogeneous = !problem.wall_flux_lo.empty() || !problem.wall_flux_hi.empty();
  if (inhomogeneous) {
    // Polynomial lifting psi = c1 x + c2 x^2 + c3 x^3 + c4 x^4 per x2 node,
    // matching d1 phi and d1^3 phi = d1 rhs - d2^2 (d1 phi) at both walls so
    // that the remainder extends evenly with a smooth third derivative.
    GridFunction lo(grid), hi(grid);
    for (int j = 0; j < n2; ++j) {
      lo(0, j) = problem.wall_flux_lo.empty() ? 0.0 : problem.wall_flux_lo[static_cast<std::size_t>(j)];
      hi(0, j) = problem.wall_flux_hi.empty() ? 0.0 : problem.wall_flux_hi[static_cast<std::size_t>(j)];
    }
    const GridFunction lo2 = second_diff_x2(lo, grid);
    const GridFunction hi2 = second_diff_x2(hi, grid);
    const GridFunction drhs = diff(problem.rhs, 1, grid, DiffMode::one_sided);
    const double L = grid.L1;
    GridFunction lift_xx(grid);
    for (int j = 0; j < n2; ++j) {
      const double a1 = lo(0, j), b1 = hi(0, j);
      const double a3 = drhs(0, j) - lo2(0, j);
      const double b3 = drhs(n1 - 1, j) - hi2(0, j);
      const double c1 = a1, c3 = a3 / 6.0, c4 = (b3 - a3) / (24.0 * L);
      const double c2 = (b1 - c1 - 3.0 * c3 * L * L - 4.0 * c4 * L * L * L) / (2.0 * L);
      for (int i = 0; i < n1; ++i) {
        const double x = grid.x1(i);
        lift(i, j) = x * (c1 + x * (c2 + x * (c3 + x * c4)));
        lift_xx(i, j) = 2.0 * c2 + 6.0 * c3 * x + 12.0 * c4 * x * x;
      }
    }
    axpy(-1.0, lift_xx, rhs);
    axpy(-1.0, second_diff_x2(lift, grid), rhs);
  }

  const double scale = std::max({max_abs(rhs), problem.reference_scale, 1e-300});
  const double defect = impl_->remove_null_modes(rhs);
  if (std::abs(defect) > problem.compatibility_threshold * scale) {
    std::ostringstream os;
    os << "Neumann data incompatible: mean defect " << defect << " exceeds correction threshold";
    throw SolverError(os.str());
  }

  GridFunction phi = impl_->solve_homogeneous(rhs);

  GridFunction res = apply_laplacian(phi, grid);
  axpy(-1.0, rhs, res);
  impl_->last_residual = max_abs(res) / scale;
  if (max_abs(rhs) > 0.0 && !(impl_->last_residual <= problem.tolerance)) {
    std::ostringstream os;
    os << "Poisson residual " << impl_->last_residual << " above tolerance " << problem.tolerance;
    throw SolverError(os.str());
  }

  if (inhomogeneous) axpy(1.0, lift, phi);
  const double mean = weighted_mean(phi, grid);
  for (int i = 0; i < n1; ++i)
    for (double& v : phi.row(i)) v -= mean;
  fill_ghosts(phi, Parity::even);
  return phi;
}

PlaneVector Helmholtz::gradient(const GridFunction& phi) const {
  GridFunction p = phi;
  fill_ghosts(p, Parity::even);
  return {diff(p, 1, impl_->grid), diff(p, 2, impl_->grid)};
}

PlaneVector Helmholtz::project_G(const PlaneVector& v) {
  PoissonProblem prob;
  prob.rhs = divergence(v.c1, v.c2, impl_->grid);
  prob.reference_scale =
      std::max(max_abs(v.c1), max_abs(v.c2)) / std::min(impl_->grid.dx1, impl_->grid.dx2);
  // Tighter than the default: the range of D is reached to rounding.
  prob.tolerance = 1e-9;
  GridFunction phi = solve_poisson_neumann(prob);
  return gradient(phi);
}

PlaneVector Helmholtz::project_S(const PlaneVector& v) {
  PlaneVector g = project_G(v);
  PlaneVector s{v.c1, v.c2};
  axpy(-1.0, g.c1, s.c1);
  axpy(-1.0, g.c2, s.c2);
  fill_ghosts(s.c1, Parity::odd);
  fill_ghosts(s.c2, Parity::even);
  return s;
}

GridFunction solve_poisson_neumann(const PoissonProblem& problem, const Grid& grid) {
  Helmholtz h(grid);
  return h.solve_poisson_neumann(problem);
}

PlaneVector project_S(const PlaneVector& v, const Grid& grid) {
  Helmholtz h(grid);
  return h.project_S(v);
}

PlaneVector project_G(const PlaneVector& v, const Grid& grid) {
  Helmholtz h(grid);
  return h.project_G(v);
}

double inner(const GridFunction& a, const GridFunction& b, const Grid& grid) {
  double s = 0.0;
  for (int i = 0; i < grid.n1; ++i) {
    const double w = grid.weight(i);
    auto ra = a.row(i);
    auto rb = b.row(i);
    for (int j = 0; j < grid.n2; ++j) s += w * ra[static_cast<std::size_t>(j)] * rb[static_cast<std::size_t>(j)];
  }
  return s;
}

double inner(const PlaneVector& a, const PlaneVector& b, const Grid& grid) {
  return inner(a.c1, b.c1, grid) + inner(a.c2, b.c2, grid);
}

}  // namespace mhdlab
