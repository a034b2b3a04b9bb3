#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hilbertctl/sim.hpp"
#include "hilbertctl/spectral.hpp"

namespace hilbertctl {

/// x(k+1) = A x + B1 v + (C x + D1 v) w(k),  z(k) = Cbar x + Dbar v.
struct DisturbedSystem {
  int horizon = 0;
  Space H = Space::ell2(1);
  Space V = Space::ell2(1);
  Space Z = Space::ell2(1);
  std::vector<OperatorExpr> A, C, B1, D1, Cbar, Dbar;

  void validate() const;
  /// ||Dbar(k)* Cbar(k)|| <= tol for every k, else AssumptionError(k).
  void check_assumption1(double tol = 1e-12) const;
  /// C(k) = 0 and D1(k) = 0 for every k.
  bool deterministic() const;
  /// Cbar(k) = 0 and Dbar(k) = 0 for every k.
  bool zero_output() const;
};

LinearStochasticModel to_model(const DisturbedSystem& sys);

/// z(0..N) for the disturbance v(0..N) along one noise path, from x0 = 0.
std::vector<Eigen::VectorXd> eval_perturbation(
    const DisturbedSystem& sys, const std::vector<Eigen::VectorXd>& v,
    const Eigen::VectorXd& noise);

/// Y(k) = T_k(Y(k+1)) for the fixed schedule F(k): H -> V, Y(N+1) = 0.
std::vector<Eigen::MatrixXd> backward_F_equation(
    const DisturbedSystem& sys, const std::vector<Eigen::MatrixXd>& F,
    double gamma);

struct BRLOptions {
  double kappa_max = kDefaultKappaMax;
  /// Keep iterating past a non-positive pi3 as long as it stays invertible.
  /// Feasibility is still decided by the first failure; this only exposes
  /// the remaining eigenvalues for diagnosis.
  bool continue_through_indefinite = false;
  bool check_assumption = true;
};

struct BRLRun {
  double gamma = 0.0;
  bool feasible = false;
  /// Largest k with pi3 not positive, -1 when feasible.
  int failing_step = -1;
  /// Last step actually computed (0 when the recursion completed).
  int last_step = 0;
  std::vector<Eigen::MatrixXd> Y;       // k = 0..N+1, empty if not reached
  std::vector<Eigen::MatrixXd> F;       // -pi3^{-1} pi2, k = 0..N
  std::vector<SelfAdjointCert> pi3;     // k = 0..N
  std::vector<bool> computed;           // pi3[k] valid
  double min_pi3_eig = 0.0;
  std::string message;
};

BRLRun brl_check(const DisturbedSystem& sys, double gamma,
                 const BRLOptions& opts = {});

struct NormOptions {
  double gamma_lo = 0.0;
  std::optional<double> gamma_hi;
  double tol_gamma = 1e-6;
  BRLOptions brl;
};

struct NormResult {
  double norm = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  int iterations = 0;
  std::string bracket_source;
};

NormResult hinf_norm(const DisturbedSystem& sys, const NormOptions& opts = {});

struct OracleResult {
  double norm = 0.0;
  /// Disturbance along the top right singular vector, v(0..N).
  std::vector<Eigen::VectorXd> witness;
  double witness_gain = 0.0;
  Eigen::MatrixXd io_matrix;  // block lower-triangular input-output map
};

/// Throws OracleScopeError when C or D1 is nonzero at some step.
OracleResult deterministic_norm_oracle(const DisturbedSystem& sys);

/// ||z|| / ||v|| for v along one noise path (0 when v = 0).
double disturbance_gain(const DisturbedSystem& sys,
                        const std::vector<Eigen::VectorXd>& v,
                        const Eigen::VectorXd& noise);

struct Prop3Result {
  bool positive = false;
  double min_eig = 0.0;
  int worst_step = -1;
};

/// gamma^2 I - Dbar(k)* Dbar(k) > 0 for all k.
Prop3Result check_uniform_positivity_prop3(const DisturbedSystem& sys,
                                           double gamma);

}  // namespace hilbertctl
