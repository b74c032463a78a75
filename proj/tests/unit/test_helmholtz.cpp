#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mhdlab/error.hpp"
#include "mhdlab/helmholtz.hpp"
#include "mhdlab/state.hpp"

using namespace mhdlab;

namespace {

constexpr double kPi = std::numbers::pi;

PlaneVector random_admissible(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  PlaneVector v{GridFunction(g), GridFunction(g)};
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      v.c1(i, j) = (i == 0 || i == g.n1 - 1) ? 0.0 : nd(rng);
      v.c2(i, j) = nd(rng);
    }
  return v;
}

double norm(const PlaneVector& v, const Grid& g) { return std::sqrt(inner(v, v, g)); }

PlaneVector minus(const PlaneVector& a, const PlaneVector& b) {
  PlaneVector d = a;
  axpy(-1.0, b.c1, d.c1);
  axpy(-1.0, b.c2, d.c2);
  return d;
}

double weighted_mean(const GridFunction& f, const Grid& g) {
  double s = 0.0, w = 0.0;
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      s += g.weight(i) * f(i, j);
      w += g.weight(i);
    }
  return s / w;
}

}  // namespace

TEST(Poisson, ZeroDataGivesZero) {
  const Grid g = build_grid(17, 8, 1.0, 1.0);
  PoissonProblem p;
  p.rhs = GridFunction(g);
  EXPECT_EQ(max_abs(solve_poisson_neumann(p, g)), 0.0);
}

TEST(Poisson, TangentialEigenfunction) {
  double prev = 0.0;
  for (int n : {16, 32, 64}) {
    const Grid g = build_grid(n + 1, n, 1.0, 1.0);
    PoissonProblem p;
    p.rhs = GridFunction(g);
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) p.rhs(i, j) = -4.0 * kPi * kPi * std::cos(2.0 * kPi * g.x2(j));
    const GridFunction phi = solve_poisson_neumann(p, g);
    double err = 0.0;
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) err = std::max(err, std::abs(phi(i, j) - std::cos(2.0 * kPi * g.x2(j))));
    if (prev > 0.0) EXPECT_GT(std::log2(prev / err), 3.8);
    prev = err;
  }
}

TEST(Poisson, ManufacturedHomogeneousFluxIsFourthOrder) {
  // phi* = cos(pi x1) sin(2 pi x2) + x1^4 (1 - x1)^4: d1 phi* = 0 at both walls.
  const auto phi_star = [](double x, double y) {
    return std::cos(kPi * x) * std::sin(2.0 * kPi * y) + std::pow(x * (1.0 - x), 4);
  };
  const auto lap = [](double x, double y) {
    const double s = x * (1.0 - x);
    const double ds = 1.0 - 2.0 * x;
    // (s^4)'' = 12 s^2 s'^2 + 4 s^3 s'' with s'' = -2
    return -5.0 * kPi * kPi * std::cos(kPi * x) * std::sin(2.0 * kPi * y) + 12.0 * s * s * ds * ds - 8.0 * s * s * s;
  };
  double prev = 0.0;
  for (int n : {16, 32, 64, 128}) {
    const Grid g = build_grid(n + 1, n, 1.0, 1.0);
    PoissonProblem p;
    p.rhs = GridFunction(g);
    GridFunction exact(g);
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) {
        p.rhs(i, j) = lap(g.x1(i), g.x2(j));
        exact(i, j) = phi_star(g.x1(i), g.x2(j));
      }
    const double m = weighted_mean(exact, g);
    const GridFunction phi = solve_poisson_neumann(p, g);
    double err = 0.0;
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) err = std::max(err, std::abs(phi(i, j) - (exact(i, j) - m)));
    if (prev > 0.0) EXPECT_GT(std::log2(prev / err), 3.7) << "n = " << n;
    prev = err;
  }
}

TEST(Poisson, ManufacturedInhomogeneousFlux) {
  // phi* = sin(x1) cos(2 pi x2) + x1^3 / 3: d1 phi* = cos(2 pi x2) at x1 = 0 and
  // cos(1) cos(2 pi x2) + 1 at x1 = 1.
  const auto phi_star = [](double x, double y) { return std::sin(x) * std::cos(2.0 * kPi * y) + x * x * x / 3.0; };
  const auto lap = [](double x, double y) {
    return -(1.0 + 4.0 * kPi * kPi) * std::sin(x) * std::cos(2.0 * kPi * y) + 2.0 * x;
  };
  double prev = 0.0;
  for (int n : {16, 32, 64, 128}) {
    const Grid g = build_grid(n + 1, n, 1.0, 1.0);
    PoissonProblem p;
    p.rhs = GridFunction(g);
    GridFunction exact(g);
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) {
        p.rhs(i, j) = lap(g.x1(i), g.x2(j));
        exact(i, j) = phi_star(g.x1(i), g.x2(j));
      }
    for (int j = 0; j < g.n2; ++j) {
      p.wall_flux_lo.push_back(std::cos(2.0 * kPi * g.x2(j)));
      p.wall_flux_hi.push_back(std::cos(1.0) * std::cos(2.0 * kPi * g.x2(j)) + 1.0);
    }
    const double m = weighted_mean(exact, g);
    const GridFunction phi = solve_poisson_neumann(p, g);
    double err = 0.0;
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) err = std::max(err, std::abs(phi(i, j) - (exact(i, j) - m)));
    if (prev > 0.0) EXPECT_GT(std::log2(prev / err), 3.7) << "n = " << n;
    prev = err;
  }
}

TEST(Poisson, IncompatibleDataRejected) {
  const Grid g = build_grid(17, 8, 1.0, 1.0);
  PoissonProblem p;
  p.rhs = GridFunction(g);
  for (int i = 0; i < g.n1; ++i)
    for (double& v : p.rhs.row(i)) v = 1.0;
  EXPECT_THROW(solve_poisson_neumann(p, g), SolverError);
}

TEST(Projection, PureGradientAndSolenoidal) {
  const Grid g = build_grid(65, 32, 1.0, 1.0);
  Helmholtz h(g);
  GridFunction phi0(g), psi(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      const double x = g.x1(i), y = g.x2(j);
      phi0(i, j) = std::cos(2.0 * kPi * x) * std::sin(2.0 * kPi * y);
      psi(i, j) = std::pow(x * (1.0 - x), 4) * std::cos(2.0 * kPi * y);
    }
  const PlaneVector grad = h.gradient(phi0);
  const PlaneVector s_of_grad = h.project_S(grad);
  EXPECT_LT(norm(s_of_grad, g), 1e-10 * norm(grad, g));

  // Discrete curl of an odd-extended psi: (D2 psi, -D1 psi) is in the kernel
  // of D exactly and has zero normal component at the walls.
  GridFunction pe = psi;
  fill_ghosts(pe, Parity::odd);
  PlaneVector sol{diff(pe, 2, g), diff(pe, 1, g)};
  for (double& v : sol.c2.storage()) v = -v;
  const PlaneVector s = h.project_S(sol);
  EXPECT_LT(norm(minus(s, sol), g), 1e-10 * norm(sol, g));
}

TEST(Projection, RandomFieldsOrthogonalIdempotentComplementary) {
  const Grid g = build_grid(33, 16, 1.0, 1.0);
  Helmholtz h(g);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const PlaneVector v = random_admissible(g, rng);
    const double nv = norm(v, g);
    const PlaneVector s = h.project_S(v);
    const PlaneVector gr = h.project_G(v);
    EXPECT_LE(std::abs(inner(s, gr, g)), 1e-8 * nv * nv);
    EXPECT_LE(norm(minus(h.project_S(s), s), g), 1e-8 * nv);
    EXPECT_LE(norm(h.project_G(s), g), 1e-8 * nv);
    PlaneVector sum = s;
    axpy(1.0, gr.c1, sum.c1);
    axpy(1.0, gr.c2, sum.c2);
    EXPECT_LE(norm(minus(sum, v), g), 1e-12 * nv);
    EXPECT_LE(norm(s, g), nv * (1.0 + 1e-10));
    EXPECT_LE(max_abs(divergence(s.c1, s.c2, g)), 1e-8 * nv);
    for (int j = 0; j < g.n2; ++j) {
      EXPECT_EQ(s.c1(0, j), 0.0);
      EXPECT_EQ(s.c1(g.n1 - 1, j), 0.0);
    }
  }
}
