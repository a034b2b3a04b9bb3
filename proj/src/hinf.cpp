#include "hilbertctl/hinf.hpp"

#include <cmath>
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
    require_same_space(dom, fam[k].domain(), std::string(name) + " domain");
    require_same_space(cod, fam[k].codomain(), std::string(name) + " codomain");
  }
}

bool all_zero(const std::vector<OperatorExpr>& fam) {
  for (const auto& op : fam) {
    if (op.variant() == OperatorExpr::Variant::kZero) continue;
    if (op.matrix().cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

struct Pi {
  Eigen::MatrixXd pi1, pi2, pi3;
};

Pi pi_terms(const DisturbedSystem& sys, int k, const Eigen::MatrixXd& Y,
            double gamma) {
  const Eigen::MatrixXd& A = sys.A[k].matrix();
  const Eigen::MatrixXd& C = sys.C[k].matrix();
  const Eigen::MatrixXd& B1 = sys.B1[k].matrix();
  const Eigen::MatrixXd& D1 = sys.D1[k].matrix();
  const Eigen::MatrixXd As = adjoint_matrix(sys.A[k]);
  const Eigen::MatrixXd Cs = adjoint_matrix(sys.C[k]);
  const Eigen::MatrixXd B1s = adjoint_matrix(sys.B1[k]);
  const Eigen::MatrixXd D1s = adjoint_matrix(sys.D1[k]);
  const Eigen::MatrixXd Cb = sys.Cbar[k].matrix();
  const Eigen::MatrixXd Db = sys.Dbar[k].matrix();
  Pi p;
  p.pi1 = As * Y * A + Cs * Y * C - adjoint_matrix(sys.Cbar[k]) * Cb;
  p.pi2 = B1s * Y * A + D1s * Y * C;
  p.pi3 = gamma * gamma *
              Eigen::MatrixXd::Identity(sys.V.dim(), sys.V.dim()) -
          adjoint_matrix(sys.Dbar[k]) * Db + B1s * Y * B1 + D1s * Y * D1;
  p.pi1 = selfadjoint_part(p.pi1, sys.H);
  p.pi3 = selfadjoint_part(p.pi3, sys.V);
  return p;
}

}  // namespace

void DisturbedSystem::validate() const {
  if (horizon < 0) throw DimensionError("horizon must be >= 0");
  check_family(A, horizon, H, H, "A");
  check_family(C, horizon, H, H, "C");
  check_family(B1, horizon, V, H, "B1");
  check_family(D1, horizon, V, H, "D1");
  check_family(Cbar, horizon, H, Z, "Cbar");
  check_family(Dbar, horizon, V, Z, "Dbar");
}

void DisturbedSystem::check_assumption1(double tol) const {
  for (int k = 0; k <= horizon; ++k) {
    const Eigen::MatrixXd dc = adjoint_matrix(Dbar[k]) * Cbar[k].matrix();
    const double r = dc.size() ? dc.cwiseAbs().maxCoeff() : 0.0;
    if (r > tol) {
      std::ostringstream os;
      os << "Assumption 1 violated at k=" << k << ": ||Dbar* Cbar|| = " << r;
      throw AssumptionError(os.str(), k, r);
    }
  }
}

bool DisturbedSystem::deterministic() const {
  return all_zero(C) && all_zero(D1);
}

bool DisturbedSystem::zero_output() const {
  return all_zero(Cbar) && all_zero(Dbar);
}

LinearStochasticModel to_model(const DisturbedSystem& sys) {
  LinearStochasticModel m;
  m.horizon = sys.horizon;
  m.H = sys.H;
  m.A = sys.A;
  m.C = sys.C;
  m.Z = sys.Z;
  m.Cbar = sys.Cbar;
  InputChannel ch;
  ch.space = sys.V;
  ch.B = sys.B1;
  ch.D = sys.D1;
  ch.E = sys.Dbar;
  m.inputs.push_back(std::move(ch));
  return m;
}

std::vector<Eigen::VectorXd> eval_perturbation(
    const DisturbedSystem& sys, const std::vector<Eigen::VectorXd>& v,
    const Eigen::VectorXd& noise) {
  sys.validate();
  if (static_cast<int>(v.size()) != sys.horizon + 1) {
    throw DimensionError("eval_perturbation: disturbance needs N+1 entries");
  }
  Policy p;
  p.channels.resize(1);
  p.channels[0].offsets = v;
  return simulate(to_model(sys), p, Eigen::VectorXd::Zero(sys.H.dim()), noise)
      .z;
}

double disturbance_gain(const DisturbedSystem& sys,
                        const std::vector<Eigen::VectorXd>& v,
                        const Eigen::VectorXd& noise) {
  const auto z = eval_perturbation(sys, v, noise);
  double zz = 0.0;
  double vv = 0.0;
  for (int k = 0; k <= sys.horizon; ++k) {
    zz += sq_norm(sys.Z, z[k]);
    vv += sq_norm(sys.V, v[k]);
  }
  return vv > 0.0 ? std::sqrt(zz / vv) : 0.0;
}

std::vector<Eigen::MatrixXd> backward_F_equation(
    const DisturbedSystem& sys, const std::vector<Eigen::MatrixXd>& F,
    double gamma) {
  sys.validate();
  const int N = sys.horizon;
  if (static_cast<int>(F.size()) != N + 1) {
    throw DimensionError("backward_F_equation: F needs N+1 entries");
  }
  std::vector<Eigen::MatrixXd> Y(N + 2);
  Y[N + 1] = Eigen::MatrixXd::Zero(sys.H.dim(), sys.H.dim());
  for (int k = N; k >= 0; --k) {
    if (F[k].rows() != sys.V.dim() || F[k].cols() != sys.H.dim()) {
      throw DimensionError("backward_F_equation: F(" + std::to_string(k) +
                           ") has the wrong shape");
    }
    const Pi p = pi_terms(sys, k, Y[k + 1], gamma);
    const Eigen::MatrixXd Fs = adjoint_matrix(F[k], sys.H, sys.V);
    const Eigen::MatrixXd pi2s = adjoint_matrix(p.pi2, sys.H, sys.V);
    Y[k] = selfadjoint_part(
        p.pi1 + pi2s * F[k] + Fs * p.pi2 + Fs * p.pi3 * F[k], sys.H);
  }
  return Y;
}

BRLRun brl_check(const DisturbedSystem& sys, double gamma,
                 const BRLOptions& opts) {
  sys.validate();
  if (opts.check_assumption) sys.check_assumption1();
  if (!(gamma > 0.0)) throw DimensionError("brl_check: gamma must be > 0");
  const int N = sys.horizon;
  BRLRun run;
  run.gamma = gamma;
  run.Y.assign(N + 2, Eigen::MatrixXd());
  run.F.assign(N + 1, Eigen::MatrixXd());
  run.pi3.assign(N + 1, SelfAdjointCert{});
  run.computed.assign(N + 1, false);
  run.Y[N + 1] = Eigen::MatrixXd::Zero(sys.H.dim(), sys.H.dim());
  run.min_pi3_eig = std::numeric_limits<double>::infinity();
  run.feasible = true;
  for (int k = N; k >= 0; --k) {
    const Pi p = pi_terms(sys, k, run.Y[k + 1], gamma);
    const SelfAdjointCert cert = certify_selfadjoint(p.pi3, sys.V);
    run.pi3[k] = cert;
    run.computed[k] = true;
    run.last_step = k;
    run.min_pi3_eig = std::min(run.min_pi3_eig, cert.min_eig);
    if (!cert.positive() && run.feasible) {
      run.feasible = false;
      run.failing_step = k;
      std::ostringstream os;
      os << "pi3 is not positive at k=" << k << " (min eigenvalue "
         << cert.min_eig << ")";
      run.message = os.str();
      if (!opts.continue_through_indefinite) return run;
    }
    Eigen::MatrixXd inv;
    try {
      inv = invert_selfadjoint_matrix(p.pi3, sys.V, opts.kappa_max);
    } catch (const IllConditionedError& e) {
      if (run.feasible) {
        run.feasible = false;
        run.failing_step = k;
      }
      run.message += std::string(run.message.empty() ? "" : "; ") +
                     "stopped at k=" + std::to_string(k) + ": " + e.what();
      return run;
    }
    run.F[k] = -inv * p.pi2;
    const Eigen::MatrixXd pi2s = adjoint_matrix(p.pi2, sys.H, sys.V);
    run.Y[k] = selfadjoint_part(p.pi1 + pi2s * run.F[k], sys.H);
  }
  return run;
}

OracleResult deterministic_norm_oracle(const DisturbedSystem& sys) {
  sys.validate();
  if (!sys.deterministic()) {
    throw OracleScopeError(
        "deterministic_norm_oracle needs C(k) = 0 and D1(k) = 0 for all k");
  }
  const int N = sys.horizon;
  const int nv = sys.V.dim();
  const int nz = sys.Z.dim();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero((N + 1) * nz, (N + 1) * nv);
  for (int j = 0; j <= N; ++j) {
    L.block(j * nz, j * nv, nz, nv) = sys.Dbar[j].matrix();
    // state response to v(j): x(j+1) = B1(j), then x(k+1) = A(k) x(k).
    Eigen::MatrixXd X = sys.B1[j].matrix();
    for (int k = j + 1; k <= N; ++k) {
      L.block(k * nz, j * nv, nz, nv) = sys.Cbar[k].matrix() * X;
      X = sys.A[k].matrix() * X;
    }
  }
  Eigen::VectorXd wz((N + 1) * nz);
  Eigen::VectorXd wv((N + 1) * nv);
  for (int k = 0; k <= N; ++k) {
    wz.segment(k * nz, nz) = sys.Z.weights().cwiseSqrt();
    wv.segment(k * nv, nv) = sys.V.weights().cwiseSqrt();
  }
  const Eigen::MatrixXd G = wz.asDiagonal() * L * wv.cwiseInverse().asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinV);
  OracleResult out;
  out.io_matrix = L;
  out.norm = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  Eigen::VectorXd top = Eigen::VectorXd::Zero(G.cols());
  if (svd.matrixV().cols() > 0) top = svd.matrixV().col(0);
  const Eigen::VectorXd v = wv.cwiseInverse().asDiagonal() * top;
  out.witness.resize(N + 1);
  for (int k = 0; k <= N; ++k) out.witness[k] = v.segment(k * nv, nv);
  out.witness_gain =
      disturbance_gain(sys, out.witness, Eigen::VectorXd::Zero(N + 1));
  return out;
}

NormResult hinf_norm(const DisturbedSystem& sys, const NormOptions& opts) {
  sys.validate();
  if (opts.brl.check_assumption) sys.check_assumption1();
  if (!(opts.tol_gamma > 0.0)) {
    throw DimensionError("hinf_norm: tol_gamma must be > 0");
  }
  NormResult res;
  if (sys.zero_output()) {
    res.bracket_source = "zero output map";
    return res;
  }
  BRLOptions brl = opts.brl;
  brl.check_assumption = false;
  brl.continue_through_indefinite = false;
  auto feasible = [&](double g) { return brl_check(sys, g, brl).feasible; };

  double hi = 0.0;
  if (opts.gamma_hi) {
    hi = *opts.gamma_hi;
    res.bracket_source = "user";
    if (!(hi > 0.0) || !feasible(hi)) {
      throw BracketError("hinf_norm: gamma_hi = " + std::to_string(hi) +
                         " is not feasible");
    }
  } else if (sys.deterministic()) {
    const double exact = deterministic_norm_oracle(sys).norm;
    // The positivity tolerance keeps gamma below ~3e-5 from certifying.
    if (exact == 0.0) {
      res.bracket_source = "zero input-output map";
      return res;
    }
    hi = std::max(2.0 * exact, opts.tol_gamma);
    res.bracket_source = "2 x deterministic oracle";
    while (!feasible(hi)) {
      hi *= 2.0;
      if (hi > std::ldexp(1.0, 20)) {
        throw BracketError("hinf_norm: no feasible gamma below 2^20");
      }
    }
  } else {
    hi = 1.0;
    res.bracket_source = "doubling";
    while (!feasible(hi)) {
      hi *= 2.0;
      if (hi > std::ldexp(1.0, 20)) {
        throw BracketError("hinf_norm: no feasible gamma below 2^20");
      }
    }
  }
  double lo = std::max(0.0, opts.gamma_lo);
  if (lo >= hi) lo = 0.0;
  if (lo > 0.0 && feasible(lo)) lo = 0.0;
  while (hi - lo > opts.tol_gamma) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++res.iterations;
  }
  res.lo = lo;
  res.hi = hi;
  res.norm = 0.5 * (lo + hi);
  return res;
}

Prop3Result check_uniform_positivity_prop3(const DisturbedSystem& sys,
                                           double gamma) {
  sys.validate();
  Prop3Result r;
  r.min_eig = std::numeric_limits<double>::infinity();
  r.positive = true;
  const int nv = sys.V.dim();
  for (int k = 0; k <= sys.horizon; ++k) {
    const Eigen::MatrixXd m =
        gamma * gamma * Eigen::MatrixXd::Identity(nv, nv) -
        adjoint_matrix(sys.Dbar[k]) * sys.Dbar[k].matrix();
    const SelfAdjointCert c =
        certify_selfadjoint(selfadjoint_part(m, sys.V), sys.V);
    if (c.min_eig < r.min_eig) {
      r.min_eig = c.min_eig;
      r.worst_step = k;
    }
    r.positive = r.positive && c.positive();
  }
  return r;
}

}  // namespace hilbertctl
