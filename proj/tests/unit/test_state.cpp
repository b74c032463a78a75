#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mhdlab/error.hpp"
#include "mhdlab/helmholtz.hpp"
#include "mhdlab/norms.hpp"
#include "mhdlab/state.hpp"

using namespace mhdlab;

namespace {

double wall_max(const GridFunction& f, const Grid& g) {
  double m = 0.0;
  for (int j = 0; j < g.n2; ++j) m = std::max({m, std::abs(f(0, j)), std::abs(f(g.n1 - 1, j))});
  return m;
}

double sup(const GridFunction& f, const Grid& g) {
  double m = 0.0;
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) m = std::max(m, std::abs(f(i, j)));
  return m;
}

DataFamily family(DataKind kind) {
  DataFamily d;
  d.kind = kind;
  return d;
}

}  // namespace

TEST(Eos, DefaultLawExamples) {
  const MaterialLaw law = MaterialLaw::exponential();
  EXPECT_EQ(law.eos(0.0), std::make_pair(1.0, 1.0));
  const auto [rho, rho_p] = law.eos(1.0);
  EXPECT_DOUBLE_EQ(rho, std::exp(1.0));
  EXPECT_DOUBLE_EQ(rho_p, std::exp(1.0));
  for (double p : {-3.0, -0.2, 0.7, 4.0}) {
    const auto [r, rp] = law.eos(p);
    EXPECT_DOUBLE_EQ(rp / r, 1.0);
  }
  EXPECT_EQ(law.mu1(), 1.0);
  EXPECT_EQ(law.mu2(), 1.0);
}

TEST(Eos, OutOfRangeIsHyperbolicityError) {
  EXPECT_THROW(MaterialLaw::exponential().eos(11.0), HyperbolicityError);
  EXPECT_THROW(MaterialLaw::affine(1.0, 1.0).eos(-1.5), HyperbolicityError);
  EXPECT_THROW(MaterialLaw::from_tag("ideal-gas"), ConfigError);
  EXPECT_EQ(MaterialLaw::from_tag("affine:2:0.5").rho(2.0), 3.0);
}

TEST(TotalPressure, Examples) {
  EXPECT_DOUBLE_EQ(p_to_q(1.0, {0.0, 2.0, 0.0}, 2.0), 3.0);
  EXPECT_DOUBLE_EQ(q_to_p(3.0, {0.0, 2.0, 0.0}, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(p_to_q(0.75, {0.0, 0.0, 0.0}, 7.0), 5.25);
}

TEST(TotalPressure, RoundTrip) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int n = 0; n < 1000; ++n) {
    const double lambda = 1.0 + 63.0 * (0.5 + 0.5 * U(rng));
    const double p = 2.0 * U(rng);
    const std::array<double, 3> H{lambda * U(rng), lambda * U(rng), lambda * U(rng)};
    EXPECT_NEAR(q_to_p(p_to_q(p, H, lambda), H, lambda), p, 1e-13 * (1.0 + lambda));
  }
}

TEST(InitialData, WellPreparedIsCompatible) {
  const Grid g = build_grid(129, 64, 1.0, 1.0);
  const StateField u = make_initial_data(family(DataKind::well_prepared), g, 8.0);
  EXPECT_EQ(wall_max(u[kV1], g), 0.0);
  EXPECT_EQ(wall_max(u[kH1], g), 0.0);
  EXPECT_EQ(sup(u[kQ], g), 0.0);
  EXPECT_TRUE(check_compatibility(u, g).ok());
}

TEST(InitialData, DiscreteDivergenceIsFourthOrder) {
  double prev_v = 0.0, prev_H = 0.0;
  for (int n : {65, 129, 257}) {
    const Grid g = build_grid(n, n - 1, 1.0, 1.0);
    const StateField u = make_initial_data(family(DataKind::well_prepared), g, 4.0);
    const double dv = sup(divergence(u[kV1], u[kV2], g), g);
    const double dH = sup(divergence(u[kH1], u[kH2], g), g);
    if (prev_v > 0.0) {
      EXPECT_GT(std::log2(prev_v / dv), 3.5) << "n = " << n;
      EXPECT_GT(std::log2(prev_H / dH), 3.5) << "n = " << n;
    }
    prev_v = dv;
    prev_H = dH;
  }
}

TEST(InitialData, VelocityAndFieldDoNotDependOnLambda) {
  const Grid g = build_grid(33, 16, 1.0, 1.0);
  for (DataKind k : {DataKind::well_prepared, DataKind::ill_prepared}) {
    const StateField a = make_initial_data(family(k), g, 4.0), b = make_initial_data(family(k), g, 32.0);
    for (int c = kV1; c < kNumComponents; ++c)
      for (int i = 0; i < g.n1; ++i)
        for (int j = 0; j < g.n2; ++j) EXPECT_EQ(a[c](i, j), b[c](i, j));
  }
}

TEST(InitialData, IllPreparedGradientPartConverges) {
  const DataFamily d = family(DataKind::ill_prepared);
  std::vector<double> err;
  for (int n : {33, 65, 129}) {
    const Grid g = build_grid(n, 16, 1.0, 1.0);
    const StateField u = make_initial_data(d, g, 4.0);
    const PlaneVector v{u[kV1], u[kV2]};
    const PlaneVector pg = project_G(v, g), ps = project_S(v, g);
    const double norm = std::sqrt(l2_squared(pg.c1, g) + l2_squared(pg.c2, g));
    err.push_back(std::abs(norm - gradient_pulse_l2(d, g)) / gradient_pulse_l2(d, g));
    double recombine = 0.0;
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j)
        recombine = std::max({recombine, std::abs(pg.c1(i, j) + ps.c1(i, j) - v.c1(i, j)),
                              std::abs(pg.c2(i, j) + ps.c2(i, j) - v.c2(i, j))});
    EXPECT_LT(recombine, 1e-12);
  }
  EXPECT_LT(err[2], err[0]);
  EXPECT_LT(err[2], 1e-6);
}

TEST(InitialData, ZeroAmplitudeIsZero) {
  const Grid g = build_grid(17, 8, 1.0, 1.0);
  DataFamily d = family(DataKind::ill_prepared);
  d.amp_v = d.amp_H = d.amp_v3 = d.amp_H3 = d.amp_phi = d.amp_q = 0.0;
  EXPECT_EQ(max_abs(make_initial_data(d, g, 4.0)), 0.0);
}

TEST(InitialData, RejectsLowVanishingOrder) {
  DataFamily d;
  d.vanishing_order = 3;
  EXPECT_THROW(make_initial_data(d, build_grid(17, 8, 1.0, 1.0), 4.0), PreconditionError);
}

TEST(Compatibility, ZeroStateAndWallViolation) {
  const Grid g = build_grid(17, 8, 1.0, 1.0);
  StateField u(g, 2.0);
  const CompatibilityReport zero = check_compatibility(u, g);
  EXPECT_EQ(zero.max_wall_v1, 0.0);
  EXPECT_EQ(zero.max_wall_H1, 0.0);
  EXPECT_EQ(zero.max_div_H, 0.0);
  u[kV1](0, 3) = 0.1;
  const CompatibilityReport bad = check_compatibility(u, g);
  EXPECT_EQ(bad.max_wall_v1, 0.1);
  EXPECT_FALSE(bad.ok());
}
