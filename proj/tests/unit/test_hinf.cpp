#include <cmath>

#include <gtest/gtest.h>

#include "hilbertctl/errors.hpp"
#include "hilbertctl/examples.hpp"
#include "hilbertctl/hinf.hpp"
#include "support/random_systems.hpp"

using namespace hilbertctl;
using namespace hilbertctl::testing;

TEST(Ex3, FeasibleAboveNormInfeasibleBelow) {
  const DisturbedSystem s = example3_system();
  const BRLRun hi = brl_check(s, 1.7);
  EXPECT_TRUE(hi.feasible);
  EXPECT_EQ(hi.failing_step, -1);
  EXPECT_GT(hi.min_pi3_eig, 0.0);
  const BRLRun lo = brl_check(s, 1.6);
  EXPECT_FALSE(lo.feasible);
  EXPECT_GE(lo.failing_step, 0);
}

TEST(Ex3, OutputAtZeroCarriesFirstCoordinate) {
  const DisturbedSystem s = example3_system();
  std::vector<Eigen::VectorXd> v(s.horizon + 1, Eigen::VectorXd::Zero(4));
  v[0] << 3, 5, 7, 9;
  const auto z = eval_perturbation(s, v, Eigen::VectorXd::Zero(s.horizon + 1));
  ASSERT_EQ(z[0].size(), s.Z.dim());
  EXPECT_EQ(z[0](0), 3.0);
  EXPECT_EQ(z[0].tail(s.Z.dim() - 1).norm(), 0.0);
}

TEST(Ex3, NormAgreesWithClosedForm) {
  NormOptions o;
  o.tol_gamma = 1e-8;
  const NormResult r = hinf_norm(example3_system(), o);
  EXPECT_NEAR(r.norm, example3_norm(), 1e-7);
  EXPECT_LE(r.hi - r.lo, 1e-8 * (1 + r.hi) + 1e-15);
}

TEST(Ex3, Pi3EigenvalueMatchesClosedForm) {
  const DisturbedSystem s = example3_system();
  BRLOptions o;
  o.continue_through_indefinite = true;
  for (double g : {1.4, 1.8, 2.3}) {
    const BRLRun run = brl_check(s, g, o);
    for (int k = 0; k <= s.horizon; ++k) {
      if (!run.computed[k]) continue;
      EXPECT_NEAR(run.pi3[k].min_eig, example3_rho_min(k, g), 1e-10)
          << "gamma " << g << " step " << k;
    }
  }
}

TEST(UniformPositivity, PositiveExactlyAboveOne) {
  const DisturbedSystem s = example3_system();
  EXPECT_TRUE(check_uniform_positivity_prop3(s, 1.01).positive);
  EXPECT_FALSE(check_uniform_positivity_prop3(s, 1.0).positive);
  EXPECT_FALSE(check_uniform_positivity_prop3(s, 0.9).positive);
  EXPECT_NEAR(check_uniform_positivity_prop3(s, 2.0).min_eig, 3.0, 1e-12);
}

TEST(Assumption, CrossTermIsRejected) {
  DisturbedSystem s = example3_system();
  for (auto& c : s.Cbar) c = OperatorExpr::filling(s.H, s.Z);
  EXPECT_THROW(s.check_assumption1(), AssumptionError);
  EXPECT_THROW(brl_check(s, 2.0), AssumptionError);
}

TEST(Norm, ZeroOutputGivesZero) {
  DisturbedSystem s = example3_system();
  for (auto& c : s.Cbar) c = OperatorExpr::zero(s.H, s.Z);
  for (auto& d : s.Dbar) d = OperatorExpr::zero(s.V, s.Z);
  ASSERT_TRUE(s.zero_output());
  EXPECT_EQ(hinf_norm(s).norm, 0.0);
}

TEST(Oracle, RejectsStochasticSystems) {
  Rng g(3);
  DisturbedSystem s = random_deterministic_disturbed(g, 3, 2, 2);
  s.C[1] = OperatorExpr::identity(s.H);
  EXPECT_FALSE(s.deterministic());
  EXPECT_THROW(deterministic_norm_oracle(s), OracleScopeError);
}

TEST(Oracle, BisectionAgreesOnRandomSystems) {
  Rng g(71);
  for (int t = 0; t < 30; ++t) {
    const DisturbedSystem s = random_deterministic_disturbed(
        g, uniform_int(g, 1, 5), uniform_int(g, 1, 3), uniform_int(g, 0, 5));
    const OracleResult o = deterministic_norm_oracle(s);
    NormOptions opts;
    opts.tol_gamma = 1e-8;
    const NormResult r = hinf_norm(s, opts);
    EXPECT_NEAR(r.norm, o.norm, 1e-6 * (1 + o.norm));
    EXPECT_NEAR(o.witness_gain, o.norm, 1e-9 * (1 + o.norm));
    EXPECT_NEAR(disturbance_gain(s, o.witness,
                                 Eigen::VectorXd::Zero(s.horizon + 1)),
                o.norm, 1e-9 * (1 + o.norm));
  }
}

TEST(BRL, FeasibilityIsMonotoneInGamma) {
  Rng g(73);
  for (int t = 0; t < 20; ++t) {
    const DisturbedSystem s = random_deterministic_disturbed(
        g, uniform_int(g, 1, 4), uniform_int(g, 1, 2), uniform_int(g, 1, 4));
    const double n = deterministic_norm_oracle(s).norm;
    bool seen_feasible = false;
    for (int j = 0; j < 10; ++j) {
      const bool f = brl_check(s, n * (0.5 + 0.1 * j + 0.013)).feasible;
      if (seen_feasible) EXPECT_TRUE(f);
      seen_feasible = seen_feasible || f;
    }
    EXPECT_TRUE(seen_feasible);
  }
}

TEST(BRL, FEquationAtFeasibleGainsReproducesY) {
  const DisturbedSystem s = example3_system();
  const BRLRun run = brl_check(s, 2.0);
  ASSERT_TRUE(run.feasible);
  const auto Y = backward_F_equation(s, run.F, 2.0);
  ASSERT_EQ(Y.size(), run.Y.size());
  for (std::size_t k = 0; k < Y.size(); ++k) {
    EXPECT_LE((Y[k] - run.Y[k]).cwiseAbs().maxCoeff(), 1e-10);
  }
}
