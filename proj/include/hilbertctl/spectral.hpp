#pragma once

#include <Eigen/Dense>

#include "hilbertctl/operator.hpp"
#include "hilbertctl/space.hpp"

namespace hilbertctl {

inline constexpr double kDefaultKappaMax = 1e12;
inline constexpr double kDefaultSymmetryTol = 1e-8;

struct SelfAdjointCert {
  double min_eig = 0.0;
  double max_eig = 0.0;
  /// max |lambda| / min |lambda|; +inf when singular.
  double cond = 0.0;
  /// Positivity tolerance 1e-9 (1 + ||op||).
  double tol = 0.0;
  double symmetry_residual = 0.0;

  bool positive() const { return min_eig > tol; }
  bool nonnegative() const { return min_eig >= -tol; }
};

double positivity_tol(double op_norm);

/// W^{1/2} m W^{-1/2}, symmetric exactly when m is self-adjoint on `space`.
Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m, const Space& space);

/// Throws NotSelfAdjointError when the relative symmetry residual exceeds
/// `sym_tol`.
SelfAdjointCert certify_selfadjoint(const Eigen::MatrixXd& m,
                                    const Space& space,
                                    double sym_tol = kDefaultSymmetryTol);

SelfAdjointCert min_eig_selfadjoint(const OperatorExpr& op,
                                    double sym_tol = kDefaultSymmetryTol);

/// Inverse of a self-adjoint coordinate matrix, sign-indefinite allowed.
/// Throws IllConditionedError when cond > kappa_max.
Eigen::MatrixXd invert_selfadjoint_matrix(const Eigen::MatrixXd& m,
                                          const Space& space,
                                          double kappa_max = kDefaultKappaMax,
                                          SelfAdjointCert* cert = nullptr);

/// As above but additionally requires min_eig > tol_pos (NotPositiveError).
Eigen::MatrixXd invert_positive_matrix(const Eigen::MatrixXd& m,
                                       const Space& space,
                                       double kappa_max = kDefaultKappaMax,
                                       SelfAdjointCert* cert = nullptr);

OperatorExpr invert_positive(const OperatorExpr& op,
                             double kappa_max = kDefaultKappaMax);

/// M11 - M21* M22^{-1} M21 as a Dense operator on the domain of M11.
OperatorExpr schur_complement(const OperatorExpr& m11, const OperatorExpr& m21,
                              const OperatorExpr& m22);

/// Spectrum of the block operator [[M11, M21*], [M21, M22]] on H x U with the
/// product inner product.
SelfAdjointCert block_min_eig(const OperatorExpr& m11, const OperatorExpr& m21,
                              const OperatorExpr& m22,
                              double sym_tol = kDefaultSymmetryTol);

/// Makes a coordinate matrix exactly self-adjoint on `space`:
/// (m + m*) / 2.
Eigen::MatrixXd selfadjoint_part(const Eigen::MatrixXd& m, const Space& space);

}  // namespace hilbertctl
