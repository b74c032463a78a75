#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mhdlab/error.hpp"
#include "mhdlab/grid.hpp"

using namespace mhdlab;

namespace {

// Independent construction of the blend: sigma' on the blend interval is the
// quartic 1 - (3t^2 - 2t^3) + c t^2 (1 - t)^2, with c fixed by sigma(b) = 1.
struct SigmaOracle {
  double a, h, c;
  explicit SigmaOracle(double L1) : a(0.25 * L1), h(0.5 * L1), c(30.0 * ((1.0 - a) / h - 0.5)) {}
  double value(double x) const {
    if (x <= a) return x;
    if (x >= a + h) return 1.0;
    const double t = (x - a) / h;
    return a + h * (t - t * t * t + 0.5 * t * t * t * t +
                    c * (t * t * t / 3.0 - 0.5 * t * t * t * t + 0.2 * t * t * t * t * t));
  }
  double slope(double x) const {
    if (x <= a) return 1.0;
    if (x >= a + h) return 0.0;
    const double t = (x - a) / h;
    return 1.0 - (3.0 * t * t - 2.0 * t * t * t) + c * t * t * (1.0 - t) * (1.0 - t);
  }
};

}  // namespace

TEST(BuildGrid, RejectsTooFewNodes) {
  try {
    build_grid(5, 8, 1.0, 1.0);
    FAIL() << "expected rejection";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("n1 too small"), std::string::npos);
  }
  EXPECT_THROW(build_grid(17, 3, 1.0, 1.0), PreconditionError);
  EXPECT_THROW(build_grid(17, 8, 0.0, 1.0), PreconditionError);
  EXPECT_THROW(build_grid(17, 8, 1.0, -1.0), PreconditionError);
}

TEST(BuildGrid, Spacings) {
  const Grid g = build_grid(129, 64, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(g.dx1, 1.0 / 128.0);
  EXPECT_DOUBLE_EQ(g.dx2, 2.0 / 64.0);
  EXPECT_GE(g.ghost, 2);
}

TEST(Sigma, PlateausAndBlend) {
  const Grid g = build_grid(129, 8, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(g.sigma(0.1), 0.1);
  EXPECT_DOUBLE_EQ(g.sigma(0.9), 1.0);
  const SigmaOracle oracle(1.0);
  for (double x = 0.0; x <= 1.0; x += 0.01) {
    EXPECT_NEAR(g.sigma(x), oracle.value(x), 1e-14) << x;
    EXPECT_NEAR(g.sigma.derivative(x), oracle.slope(x), 1e-13) << x;
  }
}

TEST(Sigma, NodewiseInvariants) {
  for (double L1 : {1.0, 1.2}) {
    const Grid g = build_grid(65, 8, L1, 1.0);
    for (int i = 1; i < g.n1; ++i) {
      const double s = g.sigma_values[static_cast<std::size_t>(i)];
      EXPECT_GE(s, g.sigma_values[static_cast<std::size_t>(i - 1)]);
      EXPECT_GT(s, 0.0);
      EXPECT_LE(s, 1.0);
      if (g.x1(i) <= 0.25 * L1) EXPECT_EQ(s, g.x1(i));
      if (g.x1(i) >= 0.75 * L1) EXPECT_EQ(s, 1.0);
    }
  }
}

TEST(Sigma, RejectsLengthsWithNonMonotoneBlend) {
  // sigma' >= 0 on the blend iff 30 (2 / L1 - 1) >= -3, i.e. L1 <= 20/9.
  EXPECT_NO_THROW(build_grid(33, 8, 0.5, 1.0));
  EXPECT_NO_THROW(build_grid(33, 8, 2.2, 1.0));
  EXPECT_THROW(build_grid(33, 8, 2.3, 1.0), PreconditionError);
  EXPECT_THROW(build_grid(33, 8, 5.0, 1.0), PreconditionError);
}

TEST(GhostFill, OddReflectionZeroesWall) {
  const Grid g = build_grid(9, 4, 1.0, 1.0);
  GridFunction f(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) f(i, j) = 1.0 + i;
  fill_ghosts(f, Parity::odd);
  for (int j = 0; j < g.n2; ++j) {
    EXPECT_EQ(f(0, j), 0.0);
    EXPECT_EQ(f(-1, j), -f(1, j));
    EXPECT_EQ(f(-2, j), -f(2, j));
    EXPECT_EQ(f(g.n1 - 1, j), 0.0);
    EXPECT_EQ(f(g.n1, j), -f(g.n1 - 2, j));
  }
}

TEST(GhostFill, EvenReflectionAndConstants) {
  const Grid g = build_grid(9, 4, 1.0, 1.0);
  GridFunction f(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) f(i, j) = 0.5 * i + j;
  fill_ghosts(f, Parity::even);
  for (int j = 0; j < g.n2; ++j) {
    EXPECT_EQ(f(-1, j), f(1, j));
    EXPECT_EQ(f(-2, j), f(2, j));
    EXPECT_EQ(f(g.n1 + 1, j), f(g.n1 - 3, j));
  }
  GridFunction c(g);
  for (int i = 0; i < g.n1; ++i)
    for (double& v : c.row(i)) v = 3.25;
  fill_ghosts(c, Parity::even);
  for (double v : c.storage()) EXPECT_EQ(v, 3.25);
}

TEST(GhostFill, Idempotent) {
  const Grid g = build_grid(11, 5, 1.0, 1.0);
  GridFunction f(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) f(i, j) = std::sin(1.3 * i + 0.7 * j);
  for (Parity p : {Parity::even, Parity::odd}) {
    GridFunction once = f;
    fill_ghosts(once, p);
    GridFunction twice = once;
    fill_ghosts(twice, p);
    EXPECT_EQ(once.storage(), twice.storage());
  }
}

TEST(Diff, ConstantAndLinearAreExact) {
  const Grid g = build_grid(17, 8, 1.0, 1.0);
  GridFunction c(g), lin(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      c(i, j) = 2.0;
      lin(i, j) = g.x1(i);
    }
  for (DiffMode mode : {DiffMode::ghost, DiffMode::one_sided}) {
    GridFunction cc = c;
    fill_ghosts(cc, Parity::even);
    EXPECT_EQ(max_abs(diff(cc, 1, g, mode)), 0.0);
    EXPECT_EQ(max_abs(diff(cc, 2, g, mode)), 0.0);
  }
  const GridFunction d = diff(lin, 1, g, DiffMode::one_sided);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) EXPECT_NEAR(d(i, j), 1.0, 1e-12);
}

TEST(Diff, PeriodicDirectionIsFourthOrder) {
  double prev = 0.0;
  for (int n2 : {16, 32, 64}) {
    const Grid g = build_grid(9, n2, 1.0, 1.0);
    GridFunction f(g);
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) f(i, j) = std::sin(2.0 * std::numbers::pi * g.x2(j));
    const GridFunction d = diff(f, 2, g);
    double err = 0.0;
    for (int j = 0; j < g.n2; ++j)
      err = std::max(err, std::abs(d(3, j) - 2.0 * std::numbers::pi * std::cos(2.0 * std::numbers::pi * g.x2(j))));
    if (prev > 0.0) EXPECT_GT(std::log2(prev / err), 3.8);
    prev = err;
  }
}

TEST(Diff, OneSidedClosureIsFourthOrder) {
  double prev = 0.0;
  for (int n1 : {17, 33, 65}) {
    const Grid g = build_grid(n1, 4, 1.0, 1.0);
    GridFunction f(g);
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) f(i, j) = std::exp(g.x1(i));
    const GridFunction d = diff(f, 1, g, DiffMode::one_sided);
    double err = 0.0;
    for (int i = 0; i < g.n1; ++i) err = std::max(err, std::abs(d(i, 0) - std::exp(g.x1(i))));
    if (prev > 0.0) EXPECT_GT(std::log2(prev / err), 3.7);
    prev = err;
  }
}

TEST(ConormalDiff, IdentityAndFirstOrders) {
  const Grid g = build_grid(33, 4, 1.0, 1.0);
  GridFunction f(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) f(i, j) = g.x1(i);
  EXPECT_EQ(conormal_diff(f, {}, 0, g).interior(), f.interior());

  const GridFunction s = conormal_diff(f, {1, 0, 0}, 0, g);
  const GridFunction d = conormal_diff(f, {}, 1, g);
  for (int i = 0; i < g.n1; ++i) {
    EXPECT_NEAR(s(i, 1), g.sigma(g.x1(i)), 1e-12);
    if (g.x1(i) <= 0.25) EXPECT_NEAR(s(i, 1), g.x1(i), 1e-12);
    EXPECT_NEAR(d(i, 1), 1.0, 1e-12);
  }
  EXPECT_THROW(conormal_diff(f, {1, 0, 0}, 2, g), PreconditionError);
  EXPECT_EQ(max_abs(conormal_diff(f, {0, 0, 1}, 0, g)), 0.0);
}

TEST(ConormalDiff, SecondConormalDerivativeOfQuadratic) {
  // (sigma d1)^2 x^2 = sigma (2 x sigma)' = 2 sigma (sigma + x sigma').
  // sigma''' jumps at the blend joints, so nested differences are only
  // second order there.
  const SigmaOracle oracle(1.0);
  double prev = 0.0;
  for (int n1 : {33, 65, 129}) {
    const Grid g = build_grid(n1, 4, 1.0, 1.0);
    GridFunction f(g);
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) f(i, j) = g.x1(i) * g.x1(i);
    const GridFunction d = conormal_diff(f, {2, 0, 0}, 0, g);
    double err = 0.0;
    for (int i = 0; i < g.n1; ++i) {
      const double x = g.x1(i);
      const double exact = 2.0 * oracle.value(x) * (oracle.value(x) + x * oracle.slope(x));
      err = std::max(err, std::abs(d(i, 0) - exact));
    }
    if (prev > 0.0) EXPECT_GT(std::log2(prev / err), 1.75);
    prev = err;
  }
  EXPECT_LT(prev, 5e-4);
}
