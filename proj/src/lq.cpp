#include "hilbertctl/lq.hpp"

#include <cmath>
#include <limits>

#include "hilbertctl/errors.hpp"

namespace hilbertctl {

void LQProblem::validate() const {
  sys.validate();
  cost.validate(sys);
  if (x0.size() != sys.H.dim()) {
    throw DimensionError("x0 has " + std::to_string(x0.size()) +
                         " coordinates, expected " +
                         std::to_string(sys.H.dim()));
  }
  if (!x0.allFinite()) throw DimensionError("x0 must be finite");
}

LinearStochasticModel to_model(const ControlledSystem& sys) {
  LinearStochasticModel m;
  m.horizon = sys.horizon;
  m.H = sys.H;
  m.A = sys.A;
  m.C = sys.C;
  InputChannel ch;
  ch.space = sys.U;
  ch.B = sys.B;
  ch.D = sys.D;
  m.inputs.push_back(std::move(ch));
  return m;
}

Functional lq_cost_functional(const ControlledSystem& sys,
                              const QuadraticCost& cost) {
  return [sys, cost](const Trajectory& tr) {
    double j = 0.0;
    for (int k = 0; k <= sys.horizon; ++k) {
      const Eigen::VectorXd& x = tr.x[k];
      const Eigen::VectorXd& u = tr.u[0][k];
      j += inner(sys.H, cost.M[k].apply(x), x) +
           2.0 * inner(sys.U, cost.L[k].apply(x), u) +
           inner(sys.U, cost.R[k].apply(u), u);
    }
    const Eigen::VectorXd& xf = tr.x[sys.horizon + 1];
    j += inner(sys.H, cost.S.apply(xf), xf);
    return j;
  };
}

double eval_cost_pathwise(const LQProblem& prob,
                          const std::vector<Eigen::VectorXd>& u,
                          const Eigen::VectorXd& noise) {
  prob.validate();
  if (static_cast<int>(u.size()) != prob.sys.horizon + 1) {
    throw DimensionError("eval_cost_pathwise: control sequence needs N+1 "
                         "entries");
  }
  Policy p;
  p.channels.resize(1);
  p.channels[0].offsets = u;
  const Trajectory tr = simulate(to_model(prob.sys), p, prob.x0, noise);
  return lq_cost_functional(prob.sys, prob.cost)(tr);
}

LQSolution solve_lq(const LQProblem& prob, const RiccatiOptions& opts) {
  prob.validate();
  LQSolution out;
  out.riccati = solve_backward_riccati(prob.sys, prob.cost, opts);
  if (out.riccati.status == RiccatiStatus::kDomainFailure) {
    out.optimal_value = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  out.gains = out.riccati.K;
  out.optimal_value =
      inner(prob.sys.H, out.riccati.P[0] * prob.x0, prob.x0);
  out.well_posed = out.riccati.solved();
  return out;
}

Policy feedback_policy(const std::vector<Eigen::MatrixXd>& gains) {
  Policy p;
  p.channels.resize(1);
  p.channels[0].gains = gains;
  return p;
}

CompletingSquareReport completing_square_residual(const LQProblem& prob,
                                                  const RiccatiSolution& ric,
                                                  const Policy& policy,
                                                  int workers) {
  prob.validate();
  if (ric.status == RiccatiStatus::kDomainFailure) {
    throw DomainError("completing_square_residual needs a Riccati run that "
                      "reached k = 0",
                      ric.failed_step);
  }
  if (prob.sys.horizon > kMaxEnumerationHorizon) {
    throw EnumerationLimitError("completing_square_residual: N = " +
                                std::to_string(prob.sys.horizon) +
                                " exceeds the enumeration limit");
  }
  const LinearStochasticModel model = to_model(prob.sys);
  const Functional cost = lq_cost_functional(prob.sys, prob.cost);
  const ControlledSystem& sys = prob.sys;
  const Functional square = [&sys, &ric](const Trajectory& tr) {
    double s = 0.0;
    for (int k = 0; k <= sys.horizon; ++k) {
      const Eigen::VectorXd e = tr.u[0][k] - ric.K[k] * tr.x[k];
      s += inner(sys.U, ric.R[k] * e, e);
    }
    return s;
  };
  CompletingSquareReport r;
  r.cost = enumerate_expectation(model, policy, prob.x0, cost, workers);
  r.remainder = enumerate_expectation(model, policy, prob.x0, square, workers);
  r.value = inner(sys.H, ric.P[0] * prob.x0, prob.x0);
  r.residual = std::abs(r.cost - r.value - r.remainder);
  r.relative = r.residual / (1.0 + std::abs(r.cost));
  return r;
}

CompletingSquareReport completing_square_residual(
    const LQProblem& prob, const RiccatiSolution& ric,
    const std::vector<Eigen::VectorXd>& u, int workers) {
  Policy p;
  p.channels.resize(1);
  p.channels[0].offsets = u;
  return completing_square_residual(prob, ric, p, workers);
}

WellPosedness well_posedness_certificate(const LQProblem& prob,
                                         const RiccatiOptions& opts) {
  const LQSolution sol = solve_lq(prob, opts);
  WellPosedness w;
  if (sol.riccati.solved()) {
    w.certified = true;
    w.lower_bound = sol.optimal_value;
    w.reason = "Riccati solution with uniformly positive R(k)";
  } else {
    w.reason = "unknown: " + sol.riccati.message;
  }
  return w;
}

}  // namespace hilbertctl
