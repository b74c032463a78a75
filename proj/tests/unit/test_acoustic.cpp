#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "mhdlab/acoustic.hpp"
#include "mhdlab/error.hpp"
#include "mhdlab/helmholtz.hpp"

using namespace mhdlab;

namespace {

constexpr double kPi = std::numbers::pi;

double max_diff(const GridFunction& a, const GridFunction& b, int n1, int n2) {
  double m = 0.0;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
  return m;
}

}  // namespace

TEST(Acoustic, ModalExampleIsStandingCosine) {
  const Grid g = build_grid(33, 8, 1.0, 1.0);
  AcousticMode mode;  // k1 = 1, lambda = 1, mu = 1
  for (double t : {0.0, 0.3, 0.77}) {
    const AcousticField f = modal_solution(mode, g, t);
    for (int i = 0; i < g.n1; ++i) {
      EXPECT_NEAR(f.q(i, 3), std::cos(kPi * g.x1(i)) * std::cos(kPi * t), 1e-14);
      EXPECT_NEAR(f.v[0](i, 3), std::sin(kPi * g.x1(i)) * std::sin(kPi * t), 1e-14);
    }
  }
}

TEST(Acoustic, VelocityVanishesInitiallyAndFrequencyScalesWithLambda) {
  const Grid g = build_grid(17, 16, 1.0, 2.0);
  AcousticMode mode{2, 1, 0.7, 3.0, 1.0, 1.0};
  const AcousticField f = modal_solution(mode, g, 0.0);
  EXPECT_EQ(max_abs(f.v[0]), 0.0);
  EXPECT_EQ(max_abs(f.v[1]), 0.0);
  const double w = mode.frequency(g);
  mode.lambda *= 2.0;
  EXPECT_NEAR(mode.frequency(g), 2.0 * w, 1e-12 * w);
}

TEST(Acoustic, RunLinearReproducesModalSolution) {
  const Grid g = build_grid(33, 16, 1.0, 1.0);
  for (const AcousticMode mode : {AcousticMode{1, 0, 1.0, 4.0, 1.0, 1.0}, AcousticMode{3, 2, 0.5, 2.0, 2.0, 0.5}}) {
    const std::vector<double> times{0.0, 0.11, 0.5, 1.3};
    const auto traj = run_linear(modal_solution(mode, g, 0.0), g, mode.lambda, mode.mu1, mode.mu2, times);
    for (std::size_t k = 0; k < times.size(); ++k) {
      const AcousticField ref = modal_solution(mode, g, times[k]);
      EXPECT_LT(max_diff(traj[k].q, ref.q, g.n1, g.n2), 1e-12);
      EXPECT_LT(max_diff(traj[k].v[0], ref.v[0], g.n1, g.n2), 1e-12);
      EXPECT_LT(max_diff(traj[k].v[1], ref.v[1], g.n1, g.n2), 1e-12);
    }
  }
}

TEST(Acoustic, EnergyConservedAndWallsRespected) {
  const Grid g = build_grid(65, 32, 1.0, 1.0);
  DataFamily fam;
  const StateField u = make_initial_data(fam, g, 8.0);
  AcousticField f0 = AcousticField::from(u);
  for (const AcousticSymbol sym : {AcousticSymbol::exact, AcousticSymbol::discrete}) {
    const auto traj = run_linear(f0, g, 8.0, 1.0, 1.0, {0.0, 0.05, 0.2, 0.9}, sym);
    const double e0 = acoustic_energy(traj.front(), g, 1.0, 1.0);
    for (const auto& f : traj) {
      EXPECT_NEAR(acoustic_energy(f, g, 1.0, 1.0), e0, 1e-11 * e0);
      for (int j = 0; j < g.n2; ++j) {
        EXPECT_EQ(f.v[0](0, j), 0.0);
        EXPECT_EQ(f.v[0](g.n1 - 1, j), 0.0);
      }
    }
  }
}

TEST(Acoustic, RejectsNonzeroWallVelocity) {
  const Grid g = build_grid(17, 8, 1.0, 1.0);
  AcousticField f(g);
  f.v[0](0, 2) = 0.1;
  EXPECT_THROW(run_linear(f, g, 1.0, 1.0, 1.0, {0.0}), PreconditionError);
}

TEST(Acoustic, DiscreteSymbolLeavesSolenoidalPartFixed) {
  const Grid g = build_grid(65, 32, 1.0, 1.0);
  DataFamily fam;
  AcousticField f0 = AcousticField::from(make_initial_data(fam, g, 8.0));
  const auto traj = run_linear(f0, g, 8.0, 1.0, 1.0, {0.0, 0.37, 1.9}, AcousticSymbol::discrete);
  Helmholtz h(g);
  const PlaneVector s0 = h.project_S({traj[0].v[0], traj[0].v[1]});
  for (const auto& f : traj) {
    const PlaneVector s = h.project_S({f.v[0], f.v[1]});
    EXPECT_LT(max_diff(s.c1, s0.c1, g.n1, g.n2), 1e-11);
    EXPECT_LT(max_diff(s.c2, s0.c2, g.n1, g.n2), 1e-11);
  }
}

TEST(Acoustic, PulseLeavesTheWindowBeforeReturning) {
  const Grid g = build_grid(129, 16, 1.0, 1.0);
  DataFamily fam;
  const LayerDecayReport rep = pulse_layer_decay(fam, g, 8.0);
  EXPECT_GT(rep.initial_energy, 0.0);
  EXPECT_LE(rep.min_ratio, 0.5);
  EXPECT_GT(rep.time_of_min, 0.0);
  EXPECT_LT(rep.time_of_min, rep.return_time);
  EXPECT_LT(rep.ps_drift, 1e-10);
}

TEST(Acoustic, ResidualTermsVanishAtRest) {
  const Grid g = build_grid(17, 8, 1.0, 1.0);
  StateField u(g, 4.0), ut(g, 4.0);
  const ResidualTerms r = residual_terms(u, ut, g);
  EXPECT_EQ(max_abs(r.G0), 0.0);
  for (const auto& G : r.G) EXPECT_EQ(max_abs(G), 0.0);
}

TEST(Acoustic, ResidualTermsReduceToAdvectionForPureShear) {
  // q = 0, H = 0, steady: G = -mu2 rho_bar (v.D)v and G0 = 0.
  const Grid g = build_grid(65, 32, 1.0, 1.0);
  StateField u(g, 16.0), ut(g, 16.0);
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      u[kV1](i, j) = std::sin(kPi * g.x1(i)) * std::cos(2.0 * kPi * g.x2(j));
      u[kV2](i, j) = std::cos(kPi * g.x1(i)) * std::sin(2.0 * kPi * g.x2(j));
    }
  const ResidualTerms r = residual_terms(u, ut, g);
  EXPECT_EQ(max_abs(r.G0), 0.0);
  double err = 0.0;
  for (int i = 2; i < g.n1 - 2; ++i)
    for (int j = 0; j < g.n2; ++j) {
      const double x = g.x1(i), y = g.x2(j);
      const double v1 = std::sin(kPi * x) * std::cos(2 * kPi * y), v2 = std::cos(kPi * x) * std::sin(2 * kPi * y);
      const double adv1 = v1 * kPi * std::cos(kPi * x) * std::cos(2 * kPi * y) -
                          v2 * 2 * kPi * std::sin(kPi * x) * std::sin(2 * kPi * y);
      err = std::max(err, std::abs(r.G[0](i, j) + adv1));
    }
  EXPECT_LT(err, 1e-3);  // 4th-order truncation at n1 = 65
  for (int j = 0; j < g.n2; ++j) {
    EXPECT_NEAR(r.G[0](0, j), 0.0, 1e-12);
    EXPECT_NEAR(r.G[0](g.n1 - 1, j), 0.0, 1e-12);
  }
}

TEST(Acoustic, ResidualTermsRequireTimeDerivative) {
  const Grid g = build_grid(17, 8, 1.0, 1.0);
  StateField u(g, 1.0);
  EXPECT_THROW(residual_terms(u, StateField{}, g), PreconditionError);
}
