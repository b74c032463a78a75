#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mhdlab/acoustic.hpp"
#include "mhdlab/error.hpp"
#include "mhdlab/norms.hpp"

using namespace mhdlab;

namespace {

constexpr double kPi = std::numbers::pi;

GridFunction smooth_random(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  GridFunction f(g);
  const double a = U(rng), b = U(rng), c = U(rng), d = U(rng);
  const int k = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      const double x = g.x1(i), y = g.x2(j);
      f(i, j) = a + b * std::cos(kPi * k * x) * std::sin(2 * kPi * y + c) + d * x * x * std::cos(2 * kPi * k * y);
    }
  return f;
}

GridFunction noise(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> N(0.0, 1.0);
  GridFunction f(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) f(i, j) = N(rng);
  return f;
}

// Simpson on a fine mesh; the integrands are piecewise smooth with kinks
// only at the sigma joints L1/4 and 3L1/4, which are mesh points.
template <class F>
double integrate01(F f) {
  const int n = 4000;
  const double h = 1.0 / n;
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

}  // namespace

TEST(IndexSet, FamiliesMatchDefinitions) {
  // m = 2: star has (a,k) with a + 2k <= 2: 1 + 2 + 3 + 1 = 7 pairs.
  EXPECT_EQ(index_set(NormFamily::star, 2).size(), 7u);
  // star2 adds a + 2k = 3 with a <= 2: (1,1) -> 2 more.
  EXPECT_EQ(index_set(NormFamily::star2, 2).size(), 9u);
  // star3 adds k = 2, a = 0.
  EXPECT_EQ(index_set(NormFamily::star3, 2).size(), 10u);
  for (const auto& [alpha, k] : index_set(NormFamily::star3, 4)) {
    EXPECT_LE(alpha.order(), 4);
    EXPECT_LE(alpha.order() + 2 * k, k >= 2 ? 6 : 5);
  }
  EXPECT_THROW(index_set(NormFamily::star, 5), PreconditionError);
}

TEST(NormSpatial, ConstantHasUnitNormEveryFamily) {
  const Grid g = build_grid(65, 16, 1.0, 1.0);
  GridFunction one(g);
  one.fill(1.0);
  for (const NormFamily fam : {NormFamily::star, NormFamily::star2, NormFamily::star3})
    for (int m = 0; m <= 4; ++m) {
      const NormReport r = norm_spatial(one, NormSpec{fam, m}, g);
      EXPECT_NEAR(r.total, 1.0, 1e-10) << to_string(fam) << " m=" << m;
    }
}

TEST(NormSpatial, LinearFieldMatchesQuadratureOracle) {
  const Grid g = build_grid(1025, 8, 1.0, 1.0);
  GridFunction x(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) x(i, j) = g.x1(i);
  const Sigma& s = g.sigma;
  const double expected = 1.0 / 3.0 + integrate01([&](double t) { return s(t) * s(t); }) +
                          integrate01([&](double t) { return std::pow(s(t) * s.derivative(t), 2); }) + 1.0;
  const NormReport r = norm_spatial(x, NormSpec{NormFamily::star, 2}, g);
  EXPECT_NEAR(r.total * r.total, expected, 1e-5);
  double sum = 0.0;
  for (const auto& t : r.terms) sum += t.value * t.value;
  EXPECT_NEAR(sum, r.total * r.total, 1e-13);
}

TEST(NormSpatial, ChainHomogeneityTriangleOnRandomFields) {
  const Grid g = build_grid(33, 16, 1.0, 1.0);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const GridFunction u = trial % 2 ? smooth_random(g, rng) : noise(g, rng);
    const GridFunction v = smooth_random(g, rng);
    const int m = 1 + trial % 4;
    const double a = norm_spatial(u, NormSpec{NormFamily::star, m}, g).total;
    const double b = norm_spatial(u, NormSpec{NormFamily::star2, m}, g).total;
    const double c = norm_spatial(u, NormSpec{NormFamily::star3, m}, g).total;
    EXPECT_LE(a, b);
    EXPECT_LE(b, c);

    GridFunction cu = u, sum = u;
    const double k = -2.75;
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) {
        cu(i, j) *= k;
        sum(i, j) += v(i, j);
      }
    EXPECT_NEAR(norm_spatial(cu, NormSpec{NormFamily::star2, m}, g).total, std::abs(k) * b, 1e-12 * b);
    const double nv = norm_spatial(v, NormSpec{NormFamily::star2, m}, g).total;
    EXPECT_LE(norm_spatial(sum, NormSpec{NormFamily::star2, m}, g).total, (b + nv) * (1.0 + 1e-14));
  }
}

TEST(NormSpatial, SubdomainRestrictsQuadrature) {
  const Grid g = build_grid(65, 8, 1.0, 1.0);
  GridFunction one(g);
  one.fill(1.0);
  NormSpec s{NormFamily::star, 0};
  s.subdomain = Subdomain{0.0, 0.5};
  EXPECT_NEAR(norm_spatial(one, s, g).total, std::sqrt(0.5), 1e-14);
}

TEST(NormSpatial, ReportSerializesTermLabels) {
  const Grid g = build_grid(17, 8, 1.0, 1.0);
  GridFunction one(g);
  one.fill(1.0);
  const std::string js = norm_spatial(one, NormSpec{NormFamily::star, 1}, g).to_json();
  EXPECT_NE(js.find("\"a1=1,a2=0,k=0\""), std::string::npos);
  EXPECT_NE(js.find("\"total\""), std::string::npos);
}

TEST(NormW1Inf, TakesConormalFirstDerivatives) {
  const Grid g = build_grid(33, 64, 1.0, 1.0);
  GridFunction f(g);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) f(i, j) = 0.1 * std::sin(2 * kPi * g.x2(j));
  EXPECT_NEAR(norm_w1inf_star(f, g), 0.2 * kPi, 1e-5);
}

namespace {

std::vector<TrajectorySample> modal_trajectory(const Grid& g, double lambda, int n) {
  AcousticMode mode{2, 0, 1.0, lambda, 1.0, 1.0};
  const double w = mode.frequency(g);
  std::vector<TrajectorySample> traj;
  for (int s = 0; s < n; ++s) {
    // One period sampled uniformly.
    const double t = 2.0 * kPi / w * s / (n - 1);
    TrajectorySample smp;
    smp.t = t;
    smp.u = StateField(g, lambda);
    smp.u_t = StateField(g, lambda);
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) {
        const double c = std::cos(2 * kPi * g.x1(i));
        smp.u[kQ](i, j) = c * std::cos(w * t);
        smp.u_t[kQ](i, j) = -w * c * std::sin(w * t);
      }
    traj.push_back(std::move(smp));
  }
  return traj;
}

}  // namespace

TEST(NormSpacetime, RestTrajectoryEqualsStaticNorm) {
  const Grid g = build_grid(33, 8, 1.0, 1.0);
  StateField u(g, 4.0);
  u[kV2].fill(0.3);
  u[kQ].fill(-1.0);
  std::vector<TrajectorySample> traj(3);
  for (int n = 0; n < 3; ++n) traj[n] = TrajectorySample{0.1 * n, u, StateField(g, 4.0), 0.0};
  NormSpec s{NormFamily::star2, 2};
  s.k_max_time = 2;
  EXPECT_NEAR(norm_spacetime_lambda(traj, s, g), norm_spatial(u, s, g).total, 1e-14);
  EXPECT_NEAR(seminorm_bracket(traj, s, g), 0.0, 1e-13);
}

TEST(NormSpacetime, WeightedTimeTermIsLambdaIndependentForFastMode) {
  const Grid g = build_grid(65, 8, 1.0, 1.0);
  NormSpec s{NormFamily::star2, 1};
  s.k_max_time = 1;
  std::vector<double> vals;
  for (double lam : {4.0, 16.0, 64.0}) {
    const auto traj = modal_trajectory(g, lam, 41);
    // Term k = 1 alone: total^2 minus the k = 0 part at the same sample.
    double sup = 0.0;
    NormSpec s0 = s;
    s0.k_max_time = 0;
    const auto full = spacetime_profile(traj, s, g, {}, false);
    const auto zero = spacetime_profile(traj, s0, g, {}, false);
    for (std::size_t n = 0; n < full.size(); ++n) sup = std::max(sup, std::sqrt(full[n] * full[n] - zero[n] * zero[n]));
    vals.push_back(sup);
  }
  EXPECT_NEAR(vals[1], vals[0], 1e-10 * vals[0]);
  EXPECT_NEAR(vals[2], vals[0], 1e-10 * vals[0]);
}

TEST(NormSpacetime, SeminormDropsOnlyZerothTerm) {
  const Grid g = build_grid(65, 8, 1.0, 1.0);
  StateField u(g, 2.0);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) u[kQ](i, j) = g.x1(i);
  std::vector<TrajectorySample> traj{TrajectorySample{0.0, u, StateField(g, 2.0), 0.0}};
  NormSpec s{NormFamily::star2, 2};
  s.k_max_time = 0;
  const double full = norm_spacetime_lambda(traj, s, g);
  const double semi = seminorm_bracket(traj, s, g);
  EXPECT_NEAR(semi * semi, full * full - l2_squared(u[kQ], g), 1e-12);
  EXPECT_LE(semi, full);
}

TEST(NormSpacetime, EmptyWindowThrows) {
  const Grid g = build_grid(17, 8, 1.0, 1.0);
  const auto traj = modal_trajectory(g, 1.0, 5);
  EXPECT_THROW(norm_spacetime_lambda(traj, NormSpec{}, g, TimeWindow{10.0, 11.0}), PreconditionError);
}

TEST(Battery, MoserDegenerateCaseIsOneHalf) {
  const Grid g = build_grid(33, 8, 1.0, 1.0);
  GridFunction one(g);
  one.fill(1.0);
  EXPECT_NEAR(moser_ratio(one, one, g, 2), 0.5, 1e-12);
}

TEST(Battery, RatiosStableUnderRefinement) {
  const std::vector<std::pair<int, int>> ladder{{65, 32}, {129, 64}, {257, 128}};
  for (const BatteryCase& c : standard_battery_cases()) {
    const BatteryReport r = embedding_battery(c, ladder, 2);
    EXPECT_TRUE(r.chain) << c.name;
    EXPECT_LE(r.max_spread, 0.10) << c.name;
    EXPECT_TRUE(std::isfinite(r.sup_sigma_division)) << c.name;
  }
}

TEST(Battery, SigmaDivisionRequiresWallZero) {
  BatteryCase c{"bad", [](double, double) { return 1.0; }, [](double, double) { return 1.0; }};
  EXPECT_THROW(embedding_battery(c, {{33, 8}}), PreconditionError);
}
