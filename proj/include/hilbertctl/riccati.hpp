#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hilbertctl/operator.hpp"
#include "hilbertctl/spectral.hpp"

namespace hilbertctl {

/// x(k+1) = A(k)x(k) + B(k)u(k) + (C(k)x(k) + D(k)u(k)) w(k), k = 0..N.
/// Every family holds N+1 operators.
struct ControlledSystem {
  int horizon = 0;
  Space H = Space::ell2(1);
  Space U = Space::ell2(1);
  std::vector<OperatorExpr> A, B, C, D;

  void validate() const;
};

/// J = E[ sum_k <M x, x> + 2 <L x, u> + <R u, u> ] + E<S x(N+1), x(N+1)>.
struct QuadraticCost {
  std::vector<OperatorExpr> M, L, R;
  OperatorExpr S = OperatorExpr::identity(Space::ell2(1));

  void validate(const ControlledSystem& sys) const;
};

enum class RiccatiStatus { kSolved, kDomainFailure, kNotUniformlyPositive };
std::string to_string(RiccatiStatus s);

struct RiccatiOptions {
  double kappa_max = kDefaultKappaMax;
};

/// Output of one backward step.
struct RiccatiStep {
  Eigen::MatrixXd P;  // Pi_k(X)
  Eigen::MatrixXd R;  // R(k) + B*XB + D*XD
  Eigen::MatrixXd G;  // L(k) + B*XA + D*XC
  Eigen::MatrixXd K;  // -R^{-1} G
  SelfAdjointCert R_cert;
};

struct RiccatiSolution {
  RiccatiStatus status = RiccatiStatus::kSolved;
  /// Step k where Dom membership failed, -1 otherwise.
  int failed_step = -1;
  std::string message;
  Space H = Space::ell2(1);
  Space U = Space::ell2(1);
  /// P[k] for k = 0..N+1. Entries at k <= failed_step are empty.
  std::vector<Eigen::MatrixXd> P;
  /// Indexed by k = 0..N; empty at k <= failed_step (except R/G at the
  /// failing step itself, which are kept for diagnosis).
  std::vector<Eigen::MatrixXd> R, G, K;
  std::vector<SelfAdjointCert> R_cert;
  /// min over computed k of min_eig(R(k)), attained at worst_R_step.
  double min_R_eig = 0.0;
  int worst_R_step = -1;

  int horizon() const { return static_cast<int>(P.size()) - 2; }
  bool solved() const { return status == RiccatiStatus::kSolved; }
  OperatorExpr P_op(int k) const;
  OperatorExpr K_op(int k) const;
};

/// (R(k), G(k)) built from a self-adjoint X on H.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> rk_gk(const ControlledSystem& sys,
                                                  const QuadraticCost& cost,
                                                  int k,
                                                  const Eigen::MatrixXd& X);

/// Pi_k(X). Throws DomainError(k) when R(k) has no bounded inverse.
RiccatiStep riccati_step(const ControlledSystem& sys, const QuadraticCost& cost,
                         int k, const Eigen::MatrixXd& X,
                         const RiccatiOptions& opts = {});

RiccatiSolution solve_backward_riccati(const ControlledSystem& sys,
                                       const QuadraticCost& cost,
                                       const RiccatiOptions& opts = {});

/// max_k ||P(k) - Pi_k(P(k+1))|| / (1 + ||P(k+1)||), max-abs entry norm.
double recursion_residual(const ControlledSystem& sys,
                          const QuadraticCost& cost,
                          const RiccatiSolution& sol);

struct Theorem2Certificate {
  bool S_nonnegative = false;
  bool R_positive = false;
  bool Psi_nonnegative = false;
  double min_eig_S = 0.0;
  double min_eig_R = 0.0;  // min over k
  double min_eig_Psi = 0.0;  // min over k
  int worst_R_step = -1;
  int worst_Psi_step = -1;

  bool all_pass() const {
    return S_nonnegative && R_positive && Psi_nonnegative;
  }
};

/// Checks S(N+1) >= 0, R(k) > 0, and Psi_k = [[M, L*], [L, R]] >= 0.
Theorem2Certificate check_theorem2(const ControlledSystem& sys,
                                   const QuadraticCost& cost);

}  // namespace hilbertctl
