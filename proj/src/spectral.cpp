#include "hilbertctl/spectral.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hilbertctl/errors.hpp"

namespace hilbertctl {

namespace {

void require_square(const Eigen::MatrixXd& m, const Space& space,
                    const char* who) {
  if (m.rows() != space.dim() || m.cols() != space.dim()) {
    throw DimensionError(std::string(who) + ": matrix is not square on " +
                         space.describe());
  }
}

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

SelfAdjointCert cert_from_eigenvalues(const Eigen::VectorXd& ev,
                                      double residual) {
  SelfAdjointCert c;
  c.min_eig = ev.minCoeff();
  c.max_eig = ev.maxCoeff();
  const double big = ev.cwiseAbs().maxCoeff();
  const double small = ev.cwiseAbs().minCoeff();
  c.cond = small > 0.0 ? big / small : std::numeric_limits<double>::infinity();
  c.tol = positivity_tol(big);
  c.symmetry_residual = residual;
  return c;
}

// Symmetric part of g after checking the relative asymmetry.
Eigen::MatrixXd checked_symmetric(const Eigen::MatrixXd& g, double sym_tol,
                                  double* residual) {
  const double r = max_abs(g - g.transpose()) / (1.0 + max_abs(g));
  if (residual) *residual = r;
  if (!(r <= sym_tol)) {
    std::ostringstream os;
    os << "operator is not self-adjoint (relative residual " << r << ")";
    throw NotSelfAdjointError(os.str());
  }
  return 0.5 * (g + g.transpose());
}

}  // namespace

double positivity_tol(double op_norm) { return 1e-9 * (1.0 + op_norm); }

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m, const Space& space) {
  require_square(m, space, "symmetrized");
  if (space.unit_weights()) return m;
  const Eigen::VectorXd s = space.weights().cwiseSqrt();
  return s.asDiagonal() * m * s.cwiseInverse().asDiagonal();
}

Eigen::MatrixXd selfadjoint_part(const Eigen::MatrixXd& m, const Space& space) {
  return 0.5 * (m + adjoint_matrix(m, space, space));
}

SelfAdjointCert certify_selfadjoint(const Eigen::MatrixXd& m,
                                    const Space& space, double sym_tol) {
  double residual = 0.0;
  const Eigen::MatrixXd g =
      checked_symmetric(symmetrized(m, space), sym_tol, &residual);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return cert_from_eigenvalues(es.eigenvalues(), residual);
}

SelfAdjointCert min_eig_selfadjoint(const OperatorExpr& op, double sym_tol) {
  require_same_space(op.domain(), op.codomain(), "min_eig_selfadjoint");
  return certify_selfadjoint(op.matrix(), op.domain(), sym_tol);
}

Eigen::MatrixXd invert_selfadjoint_matrix(const Eigen::MatrixXd& m,
                                          const Space& space,
                                          double kappa_max,
                                          SelfAdjointCert* cert) {
  double residual = 0.0;
  const Eigen::MatrixXd g =
      checked_symmetric(symmetrized(m, space), kDefaultSymmetryTol, &residual);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  const SelfAdjointCert c = cert_from_eigenvalues(es.eigenvalues(), residual);
  if (cert) *cert = c;
  if (!(c.cond <= kappa_max)) {
    std::ostringstream os;
    os << "inverse is not bounded on the truncation (cond " << c.cond
       << " > " << kappa_max << ")";
    throw IllConditionedError(os.str(), c.cond);
  }
  const Eigen::MatrixXd& v = es.eigenvectors();
  Eigen::MatrixXd ginv =
      v * es.eigenvalues().cwiseInverse().asDiagonal() * v.transpose();
  ginv = 0.5 * (ginv + ginv.transpose());
  if (space.unit_weights()) return ginv;
  const Eigen::VectorXd s = space.weights().cwiseSqrt();
  return s.cwiseInverse().asDiagonal() * ginv * s.asDiagonal();
}

Eigen::MatrixXd invert_positive_matrix(const Eigen::MatrixXd& m,
                                       const Space& space, double kappa_max,
                                       SelfAdjointCert* cert) {
  const SelfAdjointCert c = certify_selfadjoint(m, space);
  if (cert) *cert = c;
  if (!c.positive()) {
    std::ostringstream os;
    os << "operator is not positive (min eigenvalue " << c.min_eig
       << ", tolerance " << c.tol << ")";
    throw NotPositiveError(os.str(), c.min_eig);
  }
  return invert_selfadjoint_matrix(m, space, kappa_max, nullptr);
}

OperatorExpr invert_positive(const OperatorExpr& op, double kappa_max) {
  require_same_space(op.domain(), op.codomain(), "invert_positive");
  if (op.variant() == OperatorExpr::Variant::kIdentity) return op;
  return OperatorExpr::dense(
      op.domain(), op.domain(),
      invert_positive_matrix(op.matrix(), op.domain(), kappa_max));
}

OperatorExpr schur_complement(const OperatorExpr& m11, const OperatorExpr& m21,
                              const OperatorExpr& m22) {
  require_same_space(m11.domain(), m11.codomain(), "schur_complement (M11)");
  require_same_space(m22.domain(), m22.codomain(), "schur_complement (M22)");
  require_same_space(m11.domain(), m21.domain(), "schur_complement (M21)");
  require_same_space(m22.domain(), m21.codomain(), "schur_complement (M21)");
  const Eigen::MatrixXd inv =
      invert_positive_matrix(m22.matrix(), m22.domain(), kDefaultKappaMax);
  const Eigen::MatrixXd& b = m21.matrix();
  const Eigen::MatrixXd bstar = adjoint_matrix(b, m21.domain(), m21.codomain());
  const Eigen::MatrixXd s = m11.matrix() - bstar * inv * b;
  return OperatorExpr::dense(m11.domain(), m11.domain(),
                             selfadjoint_part(s, m11.domain()));
}

SelfAdjointCert block_min_eig(const OperatorExpr& m11, const OperatorExpr& m21,
                              const OperatorExpr& m22, double sym_tol) {
  require_same_space(m11.domain(), m11.codomain(), "block_min_eig (M11)");
  require_same_space(m22.domain(), m22.codomain(), "block_min_eig (M22)");
  require_same_space(m11.domain(), m21.domain(), "block_min_eig (M21)");
  require_same_space(m22.domain(), m21.codomain(), "block_min_eig (M21)");
  const Space& h = m11.domain();
  const Space& u = m22.domain();
  const int n = h.dim();
  const int p = u.dim();
  double r1 = 0.0;
  double r2 = 0.0;
  const Eigen::MatrixXd g11 =
      checked_symmetric(symmetrized(m11.matrix(), h), sym_tol, &r1);
  const Eigen::MatrixXd g22 =
      checked_symmetric(symmetrized(m22.matrix(), u), sym_tol, &r2);
  const Eigen::MatrixXd g21 = u.weights().cwiseSqrt().asDiagonal() *
                              m21.matrix() *
                              h.weights().cwiseSqrt().cwiseInverse().asDiagonal();
  Eigen::MatrixXd g(n + p, n + p);
  g.topLeftCorner(n, n) = g11;
  g.topRightCorner(n, p) = g21.transpose();
  g.bottomLeftCorner(p, n) = g21;
  g.bottomRightCorner(p, p) = g22;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  return cert_from_eigenvalues(es.eigenvalues(), std::max(r1, r2));
}

}  // namespace hilbertctl
