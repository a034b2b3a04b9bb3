#include <cmath>

#include <gtest/gtest.h>

#include "hilbertctl/errors.hpp"
#include "hilbertctl/sim.hpp"
#include "support/random_systems.hpp"

using namespace hilbertctl;
using namespace hilbertctl::testing;

namespace {

LinearStochasticModel scalar_model(double a, double c, int N) {
  LinearStochasticModel m;
  m.horizon = N;
  m.H = Space::ell2(1);
  const auto op = [&](double v) {
    return OperatorExpr::dense(m.H, m.H, Eigen::MatrixXd::Constant(1, 1, v));
  };
  m.A.assign(N + 1, op(a));
  m.C.assign(N + 1, op(c));
  return m;
}

Functional final_square() {
  return [](const Trajectory& tr) {
    return tr.x.back().squaredNorm();
  };
}

}  // namespace

TEST(Simulate, ScalarDoublingTrajectory) {
  const LinearStochasticModel m = scalar_model(2.0, 0.0, 3);
  const Trajectory tr =
      simulate(m, Policy{}, Eigen::VectorXd::Ones(1), Eigen::VectorXd::Zero(4));
  ASSERT_EQ(tr.x.size(), 5u);
  const double expected[] = {1, 2, 4, 8, 16};
  for (int k = 0; k < 5; ++k) EXPECT_EQ(tr.x[k](0), expected[k]);
}

TEST(Simulate, FeedbackAndMultiplicativeNoise) {
  LinearStochasticModel m = scalar_model(1.0, 1.0, 1);
  InputChannel ch;
  ch.space = Space::euclidean(1);
  ch.B.assign(2, OperatorExpr::dense(ch.space, m.H, Eigen::MatrixXd::Ones(1, 1)));
  ch.D.assign(2, OperatorExpr::zero(ch.space, m.H));
  m.inputs.push_back(ch);
  Policy p;
  p.channels.push_back({{Eigen::MatrixXd::Constant(1, 1, -0.5),
                         Eigen::MatrixXd::Constant(1, 1, -0.5)},
                        {},
                        {}});
  const Trajectory tr =
      simulate(m, p, Eigen::VectorXd::Ones(1), Eigen::Vector2d(1, -1));
  EXPECT_DOUBLE_EQ(tr.u[0][0](0), -0.5);
  EXPECT_DOUBLE_EQ(tr.x[1](0), 1.0 - 0.5 + 1.0);
  EXPECT_DOUBLE_EQ(tr.x[2](0), 1.5 - 0.75 - 1.5);
}

TEST(Noise, RademacherPathBits) {
  const Eigen::VectorXd w = rademacher_path(0b101, 3);
  EXPECT_EQ(w, Eigen::Vector4d(-1, 1, -1, 1));
}

TEST(Noise, UnitSecondMoment) {
  for (NoiseKind kind : {NoiseKind::kGaussian, NoiseKind::kRademacher}) {
    double s = 0.0;
    const int reps = 20000;
    for (int r = 0; r < reps; ++r) s += noise_path(kind, 9, r, 0).squaredNorm();
    EXPECT_NEAR(s / reps, 1.0, 0.05) << to_string(kind);
  }
}

TEST(Noise, KindStringsRoundTrip) {
  EXPECT_EQ(noise_kind_from_string("gaussian"), NoiseKind::kGaussian);
  EXPECT_EQ(noise_kind_from_string(to_string(NoiseKind::kRademacher)),
            NoiseKind::kRademacher);
}

TEST(Enumeration, MatchesClosedFormSecondMoment) {
  // x(k+1) = (a + c w) x gives E x(N+1)^2 = (a^2 + c^2)^(N+1).
  const LinearStochasticModel m = scalar_model(0.8, 0.5, 5);
  const double e =
      enumerate_expectation(m, Policy{}, Eigen::VectorXd::Ones(1), final_square());
  EXPECT_NEAR(e, std::pow(0.64 + 0.25, 6), 1e-14);
}

TEST(Enumeration, WorkerCountDoesNotChangeResult) {
  const LinearStochasticModel m = scalar_model(0.9, 0.4, 10);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(1);
  const double a = enumerate_expectation(m, Policy{}, x0, final_square(), 1);
  const double b = enumerate_expectation(m, Policy{}, x0, final_square(), 4);
  EXPECT_EQ(a, b);
}

TEST(Enumeration, HorizonLimit) {
  const LinearStochasticModel m = scalar_model(1.0, 0.0, kMaxEnumerationHorizon + 1);
  EXPECT_THROW(enumerate_expectation(m, Policy{}, Eigen::VectorXd::Ones(1),
                                     final_square()),
               EnumerationLimitError);
}

TEST(MonteCarlo, DeterministicAcrossWorkers) {
  const LinearStochasticModel m = scalar_model(0.9, 0.4, 6);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(1);
  const MonteCarloResult a =
      monte_carlo_expectation(m, Policy{}, x0, final_square(), 1000, 7,
                              NoiseKind::kGaussian, 1);
  const MonteCarloResult b =
      monte_carlo_expectation(m, Policy{}, x0, final_square(), 1000, 7,
                              NoiseKind::kGaussian, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.half_width, b.half_width);
  EXPECT_EQ(a.replications, 1000);
}

TEST(MonteCarlo, IntervalCoversEnumeratedMean) {
  const LinearStochasticModel m = scalar_model(0.9, 0.4, 6);
  const Eigen::VectorXd x0 = Eigen::VectorXd::Ones(1);
  const double exact = enumerate_expectation(m, Policy{}, x0, final_square());
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const MonteCarloResult r = monte_carlo_expectation(
        m, Policy{}, x0, final_square(), 4000, seed, NoiseKind::kRademacher);
    covered += std::abs(r.mean - exact) <= r.half_width;
  }
  EXPECT_GE(covered, 16);
}

TEST(Summation, PairwiseSumIsExactOnIntegers) {
  std::vector<double> v(1001);
  for (int i = 0; i <= 1000; ++i) v[i] = i;
  EXPECT_EQ(pairwise_sum(v), 500500.0);
  EXPECT_EQ(pairwise_sum(v.data(), 0), 0.0);
}

TEST(Summation, WeightedSquaredNorm) {
  const Space s = Space::l2_line(1.0, 0.5);
  EXPECT_NEAR(sq_norm(s, Eigen::VectorXd::Ones(5)), 2.0, 1e-15);
}
