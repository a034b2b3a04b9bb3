#include <cmath>

#include <gtest/gtest.h>

#include "hilbertctl/errors.hpp"
#include "hilbertctl/examples.hpp"
#include "hilbertctl/game.hpp"
#include "support/random_systems.hpp"

using namespace hilbertctl;
using namespace hilbertctl::testing;

namespace {

constexpr int kDim = 16;

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(ClosedForm, UpsilonAtGammaTwo) {
  const Ex4ClosedForm cf = example4_closed_form(2.0, 0.0);
  EXPECT_NEAR(cf.upsilon1, 0.1, 1e-15);
  EXPECT_NEAR(cf.upsilon2, -0.4, 1e-15);
  EXPECT_NEAR(cf.omega2, -0.26, 1e-15);
}

TEST(Coupled, Ex4MatchesClosedForms) {
  const TwoInputSystem s = example4_system(kDim);
  for (double g : {2.0, 2.5, 3.0}) {
    for (double r : {0.0, 0.5, 1.0}) {
      const CoupledSolution sol =
          solve_coupled_riccati(s, {g, r}, example4_x0(kDim));
      ASSERT_TRUE(sol.solved()) << sol.message;
      const Ex4Expected ex = example4_expected(g, r, kDim);
      EXPECT_LE(max_abs(sol.P1[0] - ex.P1), 1e-10);
      EXPECT_LE(max_abs(sol.P2[0] - ex.P2), 1e-10);
      EXPECT_LE(max_abs(sol.K1[0] - ex.K1), 1e-10);
      EXPECT_LE(max_abs(sol.K2[0] - ex.K2), 1e-10);
    }
  }
}

TEST(Coupled, Ex4TerminalStepActsAsMinusIdentity) {
  const TwoInputSystem s = example4_system(kDim);
  const CoupledSolution sol = solve_coupled_riccati(s, {2.0, 0.0}, example4_x0(kDim));
  ASSERT_TRUE(sol.solved());
  EXPECT_LE(max_abs(sol.P1[1] + Eigen::MatrixXd::Identity(kDim, kDim)), 1e-14);
  EXPECT_EQ(max_abs(sol.P1[2]), 0.0);
  EXPECT_EQ(max_abs(sol.P2[2]), 0.0);
}

TEST(Coupled, Ex4OneStepR2IsIdentity) {
  const TwoInputSystem s = example4_system(kDim);
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(kDim, kDim);
  const CoupledStep st = cross_coupled_step(s, {2.0, 0.0}, 1, z, z);
  EXPECT_LE(max_abs(st.R2 - Eigen::MatrixXd::Identity(st.R2.rows(), st.R2.cols())),
            1e-15);
}

TEST(Coupled, ZeroSumWhenRhoEqualsGamma) {
  Rng g(5);
  for (int t = 0; t < 10; ++t) {
    const TwoInputSystem s = random_two_input(g, uniform_int(g, 1, 4), 1,
                                              uniform_int(g, 1, 2), 3, true);
    const double gamma = 5.0;
    const CoupledSolution sol = solve_coupled_riccati(
        s, {gamma, gamma}, gaussian_vector(g, s.H.dim()));
    if (!sol.solved()) continue;
    for (std::size_t k = 0; k < sol.P1.size(); ++k) {
      EXPECT_LE(max_abs(sol.P1[k] + sol.P2[k]), 1e-9 * (1 + max_abs(sol.P1[k])));
    }
  }
}

TEST(Coupled, GainResidualIsSmall) {
  Rng g(7);
  int solved = 0;
  for (int t = 0; t < 20; ++t) {
    const TwoInputSystem s = random_two_input(
        g, uniform_int(g, 1, 4), uniform_int(g, 1, 2), uniform_int(g, 1, 2),
        uniform_int(g, 0, 4), t % 2 == 0);
    const GameParams p{uniform(g, 2.0, 4.0), uniform(g, 0.0, 1.0)};
    const CoupledSolution sol =
        solve_coupled_riccati(s, p, gaussian_vector(g, s.H.dim()));
    if (!sol.solved()) continue;
    ++solved;
    EXPECT_LE(coupled_gain_residual(s, p, sol), 1e-10);
  }
  EXPECT_GT(solved, 10);
}

TEST(Coupled, InvalidParamsRejected) {
  EXPECT_THROW((GameParams{0.0, 0.0}.validate()), Error);
  EXPECT_THROW((GameParams{1.0, -1.0}.validate()), Error);
}

TEST(H2Hinf, ZeroOutputMatrixGivesZeroDesign) {
  TwoInputSystem s = example4_system(kDim);
  for (auto& c : s.Cbar) c = OperatorExpr::zero(s.H, s.Z);
  const H2HinfDesign d = h2hinf_design(s, 2.0, example4_x0(kDim));
  ASSERT_TRUE(d.coupled.solved());
  EXPECT_EQ(d.J2, 0.0);
  for (const auto& K : d.coupled.K1) EXPECT_EQ(max_abs(K), 0.0);
  for (const auto& K : d.coupled.K2) EXPECT_EQ(max_abs(K), 0.0);
}

TEST(H2Hinf, Ex4ValueAndAttenuation) {
  const TwoInputSystem s = example4_system();
  const H2HinfDesign d = h2hinf_design(s, 2.0, example4_x0());
  ASSERT_TRUE(d.coupled.solved());
  EXPECT_NEAR(d.J2, 2.74, 1e-10);
  EXPECT_TRUE(d.closed_loop_brl.feasible);
  EXPECT_TRUE(d.attenuation_verified);
  EXPECT_TRUE(d.diagnostic.empty());
}

TEST(H2Hinf, HugeGammaIsFlagged) {
  const TwoInputSystem s = example4_system(kDim);
  const H2HinfDesign d = h2hinf_design(s, 1e6, example4_x0(kDim));
  EXPECT_FALSE(d.diagnostic.empty());
}

TEST(Hinf, DesignMatchesCoupledZeroSumGains) {
  const TwoInputSystem s = example4_system(kDim);
  const HinfDesign d = hinf_design(s, 2.0);
  const CoupledSolution sol = solve_coupled_riccati(s, {2.0, 2.0}, example4_x0(kDim));
  ASSERT_TRUE(sol.solved());
  for (int k = 0; k <= s.horizon; ++k) {
    EXPECT_LE(max_abs(d.Ku[k] - sol.K2[k]), 1e-10);
    EXPECT_LE(max_abs(d.Kv[k] - sol.K1[k]), 1e-10);
  }
}

TEST(Hinf, ClosedLoopSatisfiesBoundedRealLemma) {
  Rng g(13);
  int designed = 0;
  for (int t = 0; t < 20; ++t) {
    const TwoInputSystem s = random_two_input(g, uniform_int(g, 1, 4), 1, 1,
                                              uniform_int(g, 1, 4), false);
    const double gamma = 1.2 * (hinf_norm(open_loop_disturbed(s)).norm + 0.5);
    HinfDesign d;
    try {
      d = hinf_design(s, gamma);
    } catch (const DesignInfeasibleError&) {
      continue;
    }
    ++designed;
    EXPECT_TRUE(brl_check(closed_loop(s, d.Ku), gamma).feasible);
  }
  EXPECT_GT(designed, 10);
}

TEST(Hinf, SmallGammaIsInfeasible) {
  EXPECT_THROW(hinf_design(example4_system(kDim), 0.5), DesignInfeasibleError);
}

TEST(Nash, Ex4EquilibriumHolds) {
  const TwoInputSystem s = example4_system(kDim);
  const GameParams p{2.0, 0.5};
  const CoupledSolution sol = solve_coupled_riccati(s, p, example4_x0(kDim));
  ASSERT_TRUE(sol.solved());
  const NashReport r = verify_nash_equilibrium(s, p, sol, example4_x0(kDim), 20);
  EXPECT_GE(r.worst_margin, -1e-8);
  EXPECT_NEAR(r.J1, r.J1_riccati, 1e-10 * (1 + std::abs(r.J1)));
  EXPECT_NEAR(r.J2, r.J2_riccati, 1e-10 * (1 + std::abs(r.J2)));
  EXPECT_EQ(r.deviations, 20);
}

TEST(Nash, PerturbedGainsAreNotAnEquilibrium) {
  const TwoInputSystem s = example4_system(kDim);
  const GameParams p{2.0, 0.0};
  CoupledSolution sol = solve_coupled_riccati(s, p, example4_x0(kDim));
  ASSERT_TRUE(sol.solved());
  for (auto& K : sol.K2) K.array() += 0.1;
  const NashReport r = verify_nash_equilibrium(s, p, sol, example4_x0(kDim), 50);
  EXPECT_LT(r.worst_margin, -1e-6);
  bool improving_u = false;
  for (const auto& d : r.samples) improving_u |= d.player == 2 && d.margin < -1e-6;
  EXPECT_TRUE(improving_u);
}

TEST(Nash, HorizonLimit) {
  Rng g(1);
  const TwoInputSystem s = random_two_input(g, 2, 1, 1, kMaxNashHorizon + 1, true);
  CoupledSolution sol = solve_coupled_riccati(s, {5.0, 0.0}, Eigen::VectorXd::Ones(2));
  ASSERT_TRUE(sol.solved());
  EXPECT_THROW(verify_nash_equilibrium(s, {5.0, 0.0}, sol, Eigen::VectorXd::Ones(2)),
               EnumerationLimitError);
}

TEST(Assumption2, NonIsometricOutputRejected) {
  TwoInputSystem s = example4_system(kDim);
  for (auto& gb : s.Gbar) gb = 2.0 * gb;
  EXPECT_THROW(s.check_assumption2(), AssumptionError);
}
