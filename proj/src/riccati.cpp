#include "hilbertctl/riccati.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "hilbertctl/errors.hpp"

namespace hilbertctl {

namespace {

void check_family(const std::vector<OperatorExpr>& fam, int horizon,
                  const Space& dom, const Space& cod, const char* name) {
  if (static_cast<int>(fam.size()) != horizon + 1) {
    throw DimensionError(std::string(name) + ": expected " +
                         std::to_string(horizon + 1) + " operators, got " +
                         std::to_string(fam.size()));
  }
  for (std::size_t k = 0; k < fam.size(); ++k) {
    const std::string ctx = std::string(name) + "(" + std::to_string(k) + ")";
    require_same_space(dom, fam[k].domain(), ctx + " domain");
    require_same_space(cod, fam[k].codomain(), ctx + " codomain");
  }
}

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

}  // namespace

std::string to_string(RiccatiStatus s) {
  switch (s) {
    case RiccatiStatus::kSolved:
      return "Solved";
    case RiccatiStatus::kDomainFailure:
      return "DomainFailure";
    case RiccatiStatus::kNotUniformlyPositive:
      return "NotUniformlyPositive";
  }
  return "unknown";
}

void ControlledSystem::validate() const {
  if (horizon < 0) throw DimensionError("horizon must be >= 0");
  check_family(A, horizon, H, H, "A");
  check_family(B, horizon, U, H, "B");
  check_family(C, horizon, H, H, "C");
  check_family(D, horizon, U, H, "D");
}

void QuadraticCost::validate(const ControlledSystem& sys) const {
  check_family(M, sys.horizon, sys.H, sys.H, "M");
  check_family(L, sys.horizon, sys.H, sys.U, "L");
  check_family(R, sys.horizon, sys.U, sys.U, "R");
  require_same_space(sys.H, S.domain(), "S domain");
  require_same_space(sys.H, S.codomain(), "S codomain");
  for (int k = 0; k <= sys.horizon; ++k) {
    certify_selfadjoint(M[k].matrix(), sys.H);
    certify_selfadjoint(R[k].matrix(), sys.U);
  }
  certify_selfadjoint(S.matrix(), sys.H);
}

OperatorExpr RiccatiSolution::P_op(int k) const {
  return OperatorExpr::dense(H, H, P.at(k));
}

OperatorExpr RiccatiSolution::K_op(int k) const {
  return OperatorExpr::dense(H, U, K.at(k));
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> rk_gk(const ControlledSystem& sys,
                                                  const QuadraticCost& cost,
                                                  int k,
                                                  const Eigen::MatrixXd& X) {
  if (X.rows() != sys.H.dim() || X.cols() != sys.H.dim()) {
    throw DimensionError("rk_gk: X does not act on " + sys.H.describe());
  }
  const Eigen::MatrixXd& A = sys.A[k].matrix();
  const Eigen::MatrixXd& B = sys.B[k].matrix();
  const Eigen::MatrixXd& C = sys.C[k].matrix();
  const Eigen::MatrixXd& D = sys.D[k].matrix();
  const Eigen::MatrixXd Bs = adjoint_matrix(sys.B[k]);
  const Eigen::MatrixXd Ds = adjoint_matrix(sys.D[k]);
  const Eigen::MatrixXd XB = X * B;
  const Eigen::MatrixXd XD = X * D;
  Eigen::MatrixXd R = cost.R[k].matrix() + Bs * XB + Ds * XD;
  R = selfadjoint_part(R, sys.U);
  Eigen::MatrixXd G = cost.L[k].matrix() + Bs * (X * A) + Ds * (X * C);
  return {std::move(R), std::move(G)};
}

RiccatiStep riccati_step(const ControlledSystem& sys, const QuadraticCost& cost,
                         int k, const Eigen::MatrixXd& X,
                         const RiccatiOptions& opts) {
  RiccatiStep out;
  auto [R, G] = rk_gk(sys, cost, k, X);
  Eigen::MatrixXd Rinv;
  try {
    Rinv = invert_selfadjoint_matrix(R, sys.U, opts.kappa_max, &out.R_cert);
  } catch (const IllConditionedError& e) {
    std::ostringstream os;
    os << "P(" << k + 1 << ") is outside Dom(Pi_" << k << "): " << e.what();
    throw DomainError(os.str(), k);
  }
  const Eigen::MatrixXd& A = sys.A[k].matrix();
  const Eigen::MatrixXd& C = sys.C[k].matrix();
  const Eigen::MatrixXd As = adjoint_matrix(sys.A[k]);
  const Eigen::MatrixXd Cs = adjoint_matrix(sys.C[k]);
  const Eigen::MatrixXd Gs = adjoint_matrix(G, sys.H, sys.U);
  out.K = -Rinv * G;
  Eigen::MatrixXd P =
      As * X * A + Cs * X * C + cost.M[k].matrix() + Gs * out.K;
  out.P = selfadjoint_part(P, sys.H);
  out.R = std::move(R);
  out.G = std::move(G);
  return out;
}

RiccatiSolution solve_backward_riccati(const ControlledSystem& sys,
                                       const QuadraticCost& cost,
                                       const RiccatiOptions& opts) {
  sys.validate();
  cost.validate(sys);
  const int N = sys.horizon;
  RiccatiSolution sol;
  sol.H = sys.H;
  sol.U = sys.U;
  sol.P.assign(N + 2, Eigen::MatrixXd());
  sol.R.assign(N + 1, Eigen::MatrixXd());
  sol.G.assign(N + 1, Eigen::MatrixXd());
  sol.K.assign(N + 1, Eigen::MatrixXd());
  sol.R_cert.assign(N + 1, SelfAdjointCert{});
  sol.P[N + 1] = selfadjoint_part(cost.S.matrix(), sys.H);
  sol.min_R_eig = std::numeric_limits<double>::infinity();
  bool uniformly_positive = true;
  for (int k = N; k >= 0; --k) {
    try {
      RiccatiStep st = riccati_step(sys, cost, k, sol.P[k + 1], opts);
      sol.P[k] = std::move(st.P);
      sol.R[k] = std::move(st.R);
      sol.G[k] = std::move(st.G);
      sol.K[k] = std::move(st.K);
      sol.R_cert[k] = st.R_cert;
    } catch (const DomainError& e) {
      auto [R, G] = rk_gk(sys, cost, k, sol.P[k + 1]);
      sol.R[k] = std::move(R);
      sol.G[k] = std::move(G);
      sol.status = RiccatiStatus::kDomainFailure;
      sol.failed_step = k;
      sol.message = e.what();
      return sol;
    }
    if (sol.R_cert[k].min_eig < sol.min_R_eig) {
      sol.min_R_eig = sol.R_cert[k].min_eig;
      sol.worst_R_step = k;
    }
    if (!sol.R_cert[k].positive()) uniformly_positive = false;
  }
  if (!uniformly_positive) {
    sol.status = RiccatiStatus::kNotUniformlyPositive;
    std::ostringstream os;
    os << "R(k) is not uniformly positive (min eigenvalue " << sol.min_R_eig
       << " at k=" << sol.worst_R_step << ")";
    sol.message = os.str();
  }
  return sol;
}

double recursion_residual(const ControlledSystem& sys,
                          const QuadraticCost& cost,
                          const RiccatiSolution& sol) {
  double worst = 0.0;
  const int N = sys.horizon;
  for (int k = N; k >= 0 && k > sol.failed_step; --k) {
    // Independent path: apply the operators column by column instead of
    // multiplying cached matrices.
    const Eigen::MatrixXd& X = sol.P[k + 1];
    const int n = sys.H.dim();
    Eigen::MatrixXd P(n, n);
    const OperatorExpr As = sys.A[k].adjoint();
    const OperatorExpr Cs = sys.C[k].adjoint();
    const OperatorExpr Bs = sys.B[k].adjoint();
    const OperatorExpr Ds = sys.D[k].adjoint();
    const Eigen::MatrixXd Rinv =
        invert_selfadjoint_matrix(sol.R[k], sys.U, kDefaultKappaMax * 10);
    for (int j = 0; j < n; ++j) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, j);
      const Eigen::VectorXd ax = sys.A[k].apply(e);
      const Eigen::VectorXd cx = sys.C[k].apply(e);
      const Eigen::VectorXd g =
          cost.L[k].apply(e) + Bs.apply(Eigen::VectorXd(X * ax)) +
          Ds.apply(Eigen::VectorXd(X * cx));
      const Eigen::VectorXd rg = Rinv * g;
      const Eigen::VectorXd lrg = cost.L[k].adjoint().apply(rg);
      const Eigen::VectorXd xb = X * sys.B[k].apply(rg);
      const Eigen::VectorXd xd = X * sys.D[k].apply(rg);
      P.col(j) = As.apply(Eigen::VectorXd(X * ax)) +
                 Cs.apply(Eigen::VectorXd(X * cx)) + cost.M[k].apply(e) -
                 (lrg + sys.A[k].adjoint().apply(xb) +
                  sys.C[k].adjoint().apply(xd));
    }
    const double r = max_abs(P - sol.P[k]) / (1.0 + max_abs(X));
    worst = std::max(worst, r);
  }
  return worst;
}

Theorem2Certificate check_theorem2(const ControlledSystem& sys,
                                   const QuadraticCost& cost) {
  sys.validate();
  cost.validate(sys);
  Theorem2Certificate c;
  const SelfAdjointCert s = min_eig_selfadjoint(cost.S);
  c.min_eig_S = s.min_eig;
  c.S_nonnegative = s.nonnegative();
  c.min_eig_R = std::numeric_limits<double>::infinity();
  c.min_eig_Psi = std::numeric_limits<double>::infinity();
  bool r_ok = true;
  bool psi_ok = true;
  for (int k = 0; k <= sys.horizon; ++k) {
    const SelfAdjointCert r = min_eig_selfadjoint(cost.R[k]);
    if (r.min_eig < c.min_eig_R) {
      c.min_eig_R = r.min_eig;
      c.worst_R_step = k;
    }
    r_ok = r_ok && r.positive();
    const SelfAdjointCert p = block_min_eig(cost.M[k], cost.L[k], cost.R[k]);
    if (p.min_eig < c.min_eig_Psi) {
      c.min_eig_Psi = p.min_eig;
      c.worst_Psi_step = k;
    }
    psi_ok = psi_ok && p.nonnegative();
  }
  c.R_positive = r_ok;
  c.Psi_nonnegative = psi_ok;
  return c;
}

}  // namespace hilbertctl
