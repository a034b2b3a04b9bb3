#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hilbertctl/riccati.hpp"
#include "hilbertctl/sim.hpp"

namespace hilbertctl {

struct LQProblem {
  ControlledSystem sys;
  QuadraticCost cost;
  Eigen::VectorXd x0;

  void validate() const;
};

struct LQSolution {
  RiccatiSolution riccati;
  /// <P(0) x0, x0>; NaN unless the Riccati run reached k = 0.
  double optimal_value = 0.0;
  std::vector<Eigen::MatrixXd> gains;
  bool well_posed = false;
};

/// The controlled system as a one-channel forward model.
LinearStochasticModel to_model(const ControlledSystem& sys);

/// Pathwise quadratic cost of a simulated trajectory (channel 0 is u).
Functional lq_cost_functional(const ControlledSystem& sys,
                              const QuadraticCost& cost);

/// Cost along one noise path for an open-loop control sequence u(0..N).
double eval_cost_pathwise(const LQProblem& prob,
                          const std::vector<Eigen::VectorXd>& u,
                          const Eigen::VectorXd& noise);

LQSolution solve_lq(const LQProblem& prob, const RiccatiOptions& opts = {});

/// Feedback policy u(k) = K(k) x(k) from a completed Riccati run.
Policy feedback_policy(const std::vector<Eigen::MatrixXd>& gains);

struct CompletingSquareReport {
  double cost = 0.0;       // E J(x0, u)
  double value = 0.0;      // <P(0) x0, x0>
  double remainder = 0.0;  // E sum <R(k)(u - K x), u - K x>
  double residual = 0.0;   // |cost - value - remainder|
  double relative = 0.0;   // residual / (1 + |cost|)
};

/// Both sides of the completing-squares identity computed by exhaustive
/// Rademacher enumeration. Requires a Riccati run that reached k = 0.
CompletingSquareReport completing_square_residual(const LQProblem& prob,
                                                  const RiccatiSolution& ric,
                                                  const Policy& policy,
                                                  int workers = 1);

/// Open-loop control sequence variant.
CompletingSquareReport completing_square_residual(
    const LQProblem& prob, const RiccatiSolution& ric,
    const std::vector<Eigen::VectorXd>& u, int workers = 1);

struct WellPosedness {
  /// True when certified; false means "unknown" (the test is sufficient only).
  bool certified = false;
  std::optional<double> lower_bound;
  std::string reason;
};

WellPosedness well_posedness_certificate(const LQProblem& prob,
                                         const RiccatiOptions& opts = {});

}  // namespace hilbertctl
