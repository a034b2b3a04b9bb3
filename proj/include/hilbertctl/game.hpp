#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hilbertctl/hinf.hpp"
#include "hilbertctl/sim.hpp"
#include "hilbertctl/spectral.hpp"

namespace hilbertctl {

/// x(k+1) = A x + B1 v + B2 u + (C x + D1 v + D2 u) w(k)
/// z(k)   = Cbar x + Gbar u.
struct TwoInputSystem {
  int horizon = 0;
  Space H = Space::ell2(1);
  Space U = Space::ell2(1);
  Space V = Space::ell2(1);
  Space Z = Space::ell2(1);
  std::vector<OperatorExpr> A, C, B1, D1, B2, D2, Cbar, Gbar;

  void validate() const;
  /// Gbar* Cbar = 0 and Gbar* Gbar = I, else AssumptionError(k).
  void check_assumption2(double tol = 1e-12) const;
};

struct GameParams {
  double gamma = 1.0;
  double rho = 0.0;

  void validate() const;
};

/// Two channels: 0 is the disturbance v, 1 is the control u.
LinearStochasticModel to_model(const TwoInputSystem& sys);

struct CoupledStep {
  Eigen::MatrixXd K1, K2, P1, P2;
  Eigen::MatrixXd R1, R2;
  SelfAdjointCert R1_cert, R2_cert;
  bool fixed_point = false;  // stacked solve was singular
};

struct CoupledOptions {
  double kappa_max = kDefaultKappaMax;
  double fixed_point_tol = 1e-12;
  int fixed_point_max_iter = 500;
};

/// Gains and Riccati pair at step k given P1(k+1), P2(k+1).
/// Throws GameDomainError(k) or CouplingSingularError(k).
CoupledStep cross_coupled_step(const TwoInputSystem& sys,
                               const GameParams& params, int k,
                               const Eigen::MatrixXd& P1_next,
                               const Eigen::MatrixXd& P2_next,
                               const CoupledOptions& opts = {});

enum class CoupledStatus { kSolved, kGameDomainFailure, kCouplingSingular };
std::string to_string(CoupledStatus s);

struct CoupledSolution {
  CoupledStatus status = CoupledStatus::kSolved;
  int failed_step = -1;
  double failed_min_eig = 0.0;
  std::string message;
  std::vector<Eigen::MatrixXd> P1, P2;  // k = 0..N+1
  std::vector<Eigen::MatrixXd> K1, K2;  // k = 0..N
  std::vector<SelfAdjointCert> R1_cert, R2_cert;
  std::vector<bool> fixed_point;
  double J1 = 0.0;
  double J2 = 0.0;

  bool solved() const { return status == CoupledStatus::kSolved; }
};

CoupledSolution solve_coupled_riccati(const TwoInputSystem& sys,
                                      const GameParams& params,
                                      const Eigen::VectorXd& x0,
                                      const CoupledOptions& opts = {});

/// max_k of the relative residuals of both stationarity conditions
/// K_i = -R_i^{-1} G_i at the returned pair.
double coupled_gain_residual(const TwoInputSystem& sys,
                             const GameParams& params,
                             const CoupledSolution& sol);

struct HinfDesign {
  double gamma = 0.0;
  std::vector<Eigen::MatrixXd> P;   // k = 0..N+1
  std::vector<Eigen::MatrixXd> Ku;  // u*(k) = Ku(k) x(k)
  std::vector<Eigen::MatrixXd> Kv;  // v*(k) = Kv(k) x(k)
  std::vector<SelfAdjointCert> R1_cert, R2_cert;
};

/// Zero-sum design at level gamma. Throws DesignInfeasibleError(k).
HinfDesign hinf_design(const TwoInputSystem& sys, double gamma,
                       const CoupledOptions& opts = {});

/// The disturbed system seen by v once u = K(k) x is closed.
DisturbedSystem closed_loop(const TwoInputSystem& sys,
                            const std::vector<Eigen::MatrixXd>& Ku);

struct H2HinfDesign {
  CoupledSolution coupled;
  double J2 = 0.0;
  BRLRun closed_loop_brl;
  bool attenuation_verified = false;
  /// Set when gamma >= 1e6: the design is then effectively gamma
  /// independent and is not an H2-only design.
  std::string diagnostic;
};

/// rho = 0 game. Infeasibility is reported through coupled.status.
H2HinfDesign h2hinf_design(const TwoInputSystem& sys, double gamma,
                           const Eigen::VectorXd& x0,
                           const CoupledOptions& opts = {});

/// Pathwise J1 and J2 integrands for a trajectory of to_model(sys).
double game_index_1(const TwoInputSystem& sys, double gamma,
                    const Trajectory& tr);
double game_index_2(const TwoInputSystem& sys, double rho,
                    const Trajectory& tr);

struct NashDeviation {
  int player = 0;  // 1: v deviates (J1), 2: u deviates (J2)
  double value = 0.0;
  double margin = 0.0;  // deviating value - equilibrium value
};

struct NashReport {
  double J1 = 0.0;  // enumerated E J1 at (u*, v*)
  double J2 = 0.0;
  double J1_riccati = 0.0;
  double J2_riccati = 0.0;
  /// min over samples of margin / (1 + |equilibrium value|).
  double worst_margin = 0.0;
  int deviations = 0;
  std::vector<NashDeviation> samples;
};

/// Samples `deviations` unilateral deviations per player (feedback
/// perturbation + open-loop offset + noise-dependent dither) and evaluates
/// both indices exactly by enumeration. Throws EnumerationLimitError for
/// N > 12.
NashReport verify_nash_equilibrium(const TwoInputSystem& sys,
                                   const GameParams& params,
                                   const CoupledSolution& sol,
                                   const Eigen::VectorXd& x0,
                                   int deviations = 50,
                                   std::uint64_t seed = 1, int workers = 1);

inline constexpr int kMaxNashHorizon = 12;

}  // namespace hilbertctl
