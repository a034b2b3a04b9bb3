#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hilbertctl/space.hpp"

namespace hilbertctl {

/// A bounded linear operator between two truncated spaces, kept as a small
/// expression tree so that adjoints are formed per variant rather than by
/// transposing an approximation.
///
/// Values are immutable and cheap to copy (shared node). The coordinate
/// matrix is computed lazily once per node and cached; concurrent readers are
/// safe.
class OperatorExpr {
 public:
  enum class Variant {
    kZero,
    kIdentity,
    kScaled,
    kDense,
    kDiagonal,
    kRightShift,
    kLeftShift,
    kFilling,
    kProjection,
    kGaussianConvolution,
    kHeatSemigroup,
    kSum,
    kCompose,
    kAdjoint,
  };

  static OperatorExpr zero(const Space& domain, const Space& codomain);
  static OperatorExpr identity(const Space& space);
  static OperatorExpr scaled(double c, const OperatorExpr& inner);
  /// `matrix` is the coordinate matrix (codomain.dim x domain.dim).
  static OperatorExpr dense(const Space& domain, const Space& codomain,
                            Eigen::MatrixXd matrix);
  static OperatorExpr diagonal(const Space& space, Eigen::VectorXd entries);
  /// (a1, a2, ...) -> (0, a1, a2, ...). Coordinates pushed past the codomain
  /// truncation are dropped.
  static OperatorExpr right_shift(const Space& domain, const Space& codomain);
  /// (a1, a2, ...) -> (a2, a3, ...).
  static OperatorExpr left_shift(const Space& domain, const Space& codomain);
  /// Injection of a low-dimensional space into the leading coordinates.
  static OperatorExpr filling(const Space& domain, const Space& codomain);
  /// Extraction of the leading coordinates (adjoint of filling).
  static OperatorExpr projection(const Space& domain, const Space& codomain);
  /// f -> integral of f(s) g(t - s) ds with the normal density g of standard
  /// deviation `width`, realized with the space's trapezoid weights.
  static OperatorExpr gaussian_convolution(const Space& line, double width);
  /// exp(tau * alpha * d^2/dx^2) with zero Dirichlet data on [0, l], diagonal
  /// in the sine basis.
  static OperatorExpr heat_semigroup(const Space& interval, double alpha,
                                     double tau);
  static OperatorExpr sum(std::vector<OperatorExpr> terms);
  /// factors[0] * factors[1] * ... ; the last factor is applied first.
  static OperatorExpr compose(std::vector<OperatorExpr> factors);
  /// Unevaluated adjoint of `inner`.
  static OperatorExpr adjoint_of(const OperatorExpr& inner);

  Variant variant() const;
  const Space& domain() const;
  const Space& codomain() const;

  HVector apply(const HVector& x) const;
  /// Application on raw coordinates of the domain.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

  /// Exact adjoint with respect to the weighted inner products of the domain
  /// and codomain.
  OperatorExpr adjoint() const;

  /// Coordinate matrix, codomain.dim x domain.dim.
  const Eigen::MatrixXd& matrix() const;

  /// Operator norm on the truncation (largest singular value in the
  /// weighted geometry).
  double norm() const;

  // Variant parameters. Accessors return 0 / empty for variants that do not
  // carry the parameter.
  double scale() const;
  double width() const;
  double alpha() const;
  double tau() const;
  const Eigen::MatrixXd& dense_matrix() const;
  const Eigen::VectorXd& diagonal_entries() const;
  const std::vector<OperatorExpr>& operands() const;

  std::string variant_name() const;

 private:
  struct Node;
  explicit OperatorExpr(std::shared_ptr<const Node> node);

  std::shared_ptr<const Node> node_;
};

OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b);
OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b);
/// Composition a * b (b applied first).
OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b);
OperatorExpr operator*(double c, const OperatorExpr& a);

/// Coordinate matrix of the adjoint of an operator whose coordinate matrix is
/// `m`: W_domain^{-1} m^T W_codomain.
Eigen::MatrixXd adjoint_matrix(const Eigen::MatrixXd& m, const Space& domain,
                               const Space& codomain);

/// Coordinate matrix of op*.
Eigen::MatrixXd adjoint_matrix(const OperatorExpr& op);

}  // namespace hilbertctl
