#include <cmath>

#include <gtest/gtest.h>

#include "hilbertctl/examples.hpp"
#include "hilbertctl/lq.hpp"
#include "support/random_systems.hpp"

using namespace hilbertctl;
using namespace hilbertctl::testing;

namespace {

LQProblem scalar_problem(int N) {
  LQProblem p;
  p.sys.horizon = N;
  p.sys.H = Space::ell2(1);
  p.sys.U = Space::euclidean(1);
  const OperatorExpr one_h = OperatorExpr::identity(p.sys.H);
  const OperatorExpr one_hu =
      OperatorExpr::dense(p.sys.U, p.sys.H, Eigen::MatrixXd::Ones(1, 1));
  p.sys.A.assign(N + 1, one_h);
  p.sys.B.assign(N + 1, one_hu);
  p.sys.C = zero_family(N, p.sys.H, p.sys.H);
  p.sys.D = zero_family(N, p.sys.U, p.sys.H);
  p.cost.M.assign(N + 1, one_h);
  p.cost.L = zero_family(N, p.sys.H, p.sys.U);
  p.cost.R.assign(N + 1, OperatorExpr::identity(p.sys.U));
  p.cost.S = one_h;
  p.x0 = Eigen::VectorXd::Ones(1);
  return p;
}

LQProblem random_problem(Rng& g, bool theorem2) {
  LQProblem p;
  p.sys = random_controlled(g, uniform_int(g, 1, 4), uniform_int(g, 1, 2),
                            uniform_int(g, 1, 4), !theorem2);
  p.cost = theorem2 ? random_theorem2_cost(g, p.sys)
                    : random_indefinite_cost(g, p.sys);
  p.x0 = gaussian_vector(g, p.sys.H.dim());
  return p;
}

std::vector<Eigen::VectorXd> deterministic_optimal_controls(
    const LQProblem& p, const LQSolution& sol) {
  std::vector<Eigen::VectorXd> u;
  Eigen::VectorXd x = p.x0;
  for (int k = 0; k <= p.sys.horizon; ++k) {
    u.push_back(sol.gains[k] * x);
    x = p.sys.A[k].apply(x) + p.sys.B[k].apply(u.back());
  }
  return u;
}

}  // namespace

TEST(SolveLQ, ScalarOneStep) {
  const LQProblem p = scalar_problem(0);
  const LQSolution sol = solve_lq(p);
  ASSERT_TRUE(sol.well_posed);
  EXPECT_DOUBLE_EQ(sol.optimal_value, 1.5);
  const std::vector<Eigen::VectorXd> u{Eigen::VectorXd::Constant(1, -0.5)};
  EXPECT_DOUBLE_EQ(eval_cost_pathwise(p, u, Eigen::VectorXd::Zero(1)), 1.5);
}

TEST(SolveLQ, ZeroCostGivesZeroValueAndGains) {
  LQProblem p = scalar_problem(3);
  p.cost.M = zero_family(3, p.sys.H, p.sys.H);
  p.cost.S = OperatorExpr::zero(p.sys.H, p.sys.H);
  const LQSolution sol = solve_lq(p);
  ASSERT_TRUE(sol.well_posed);
  EXPECT_EQ(sol.optimal_value, 0.0);
  for (const auto& K : sol.gains) EXPECT_EQ(K(0, 0), 0.0);
}

TEST(SolveLQ, DomainFailureGivesNaNValue) {
  LQProblem p = scalar_problem(2);
  p.sys.B = zero_family(2, p.sys.U, p.sys.H);
  p.cost.R = zero_family(2, p.sys.U, p.sys.U);
  const LQSolution sol = solve_lq(p);
  EXPECT_FALSE(sol.well_posed);
  EXPECT_TRUE(std::isnan(sol.optimal_value));
}

TEST(SolveLQ, PathwiseCostOfOptimalControlEqualsValue) {
  Rng g(31);
  for (int t = 0; t < 30; ++t) {
    LQProblem p = random_problem(g, true);
    p.sys.C = zero_family(p.sys.horizon, p.sys.H, p.sys.H);
    p.sys.D = zero_family(p.sys.horizon, p.sys.U, p.sys.H);
    const LQSolution sol = solve_lq(p);
    ASSERT_TRUE(sol.well_posed);
    const auto u = deterministic_optimal_controls(p, sol);
    const double j =
        eval_cost_pathwise(p, u, Eigen::VectorXd::Zero(p.sys.horizon + 1));
    EXPECT_NEAR(j, sol.optimal_value, 1e-10 * (1 + std::abs(j)));
  }
}

TEST(WellPosedness, HeatExampleCasesAreCertified) {
  for (int c : {1, 2}) {
    const WellPosedness w = well_posedness_certificate(example2_problem(c));
    EXPECT_TRUE(w.certified) << "case " << c << ": " << w.reason;
    ASSERT_TRUE(w.lower_bound.has_value());
    EXPECT_TRUE(std::isfinite(*w.lower_bound));
  }
}

TEST(WellPosedness, UnknownIsNotCertified) {
  LQProblem p = scalar_problem(1);
  p.sys.B = zero_family(1, p.sys.U, p.sys.H);
  p.cost.R = zero_family(1, p.sys.U, p.sys.U);
  const WellPosedness w = well_posedness_certificate(p);
  EXPECT_FALSE(w.certified);
  EXPECT_FALSE(w.lower_bound.has_value());
}

TEST(CompletingSquare, OptimalFeedbackHasZeroRemainder) {
  Rng g(41);
  for (int t = 0; t < 30; ++t) {
    const LQProblem p = random_problem(g, false);
    const LQSolution sol = solve_lq(p);
    if (!sol.well_posed) continue;
    const CompletingSquareReport r = completing_square_residual(
        p, sol.riccati, feedback_policy(sol.gains));
    EXPECT_LE(std::abs(r.remainder), 1e-9 * (1 + std::abs(r.cost)));
    EXPECT_NEAR(r.cost, sol.optimal_value, 1e-8 * (1 + std::abs(r.cost)));
    EXPECT_LE(r.relative, 1e-8);
  }
}

TEST(CompletingSquare, IdentityHoldsForPerturbedPolicies) {
  Rng g(43);
  int checked = 0;
  for (int t = 0; t < 40; ++t) {
    const LQProblem p = random_problem(g, false);
    const LQSolution sol = solve_lq(p);
    if (!sol.well_posed) continue;
    Policy pol = feedback_policy(sol.gains);
    for (auto& K : pol.channels[0].gains) K += gaussian(g, K.rows(), K.cols(), 0.3);
    const int m = p.sys.U.dim();
    pol.channels[0].dither = [m](int k, const Eigen::VectorXd& past,
                                 const Eigen::VectorXd& x) {
      const double s = past.size() > 0 ? past.sum() : 0.0;
      return Eigen::VectorXd::Constant(m, 0.2 * std::tanh(s + x.sum() + k));
    };
    const CompletingSquareReport r =
        completing_square_residual(p, sol.riccati, pol, 2);
    EXPECT_LE(r.relative, 1e-8);
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(Optimality, PerturbationsDoNotImproveOnNonnegativeProblems) {
  Rng g(47);
  for (int t = 0; t < 30; ++t) {
    const LQProblem p = random_problem(g, true);
    const LQSolution sol = solve_lq(p);
    ASSERT_TRUE(sol.well_posed);
    std::vector<Eigen::VectorXd> u(p.sys.horizon + 1);
    for (auto& v : u) v = gaussian_vector(g, p.sys.U.dim());
    const CompletingSquareReport r =
        completing_square_residual(p, sol.riccati, u);
    EXPECT_GE(r.remainder, -1e-10);
    EXPECT_GE(r.cost, sol.optimal_value - 1e-8 * (1 + std::abs(r.cost)));
  }
}

TEST(Model, ControlledSystemMapsToOneChannel) {
  Rng g(5);
  const ControlledSystem s = random_controlled(g, 3, 2, 2);
  const LinearStochasticModel m = to_model(s);
  ASSERT_EQ(m.inputs.size(), 1u);
  EXPECT_FALSE(m.has_output());
  EXPECT_EQ(m.inputs[0].space.dim(), 2);
}
