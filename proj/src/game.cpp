#include "hilbertctl/game.hpp"

#include <cmath>
#include <limits>
#include <random>
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

double max_abs(const Eigen::MatrixXd& m) {
  return m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& gen, int r, int c) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (int j = 0; j < c; ++j) {
    for (int i = 0; i < r; ++i) m(i, j) = g(gen);
  }
  return m;
}

// A random adapted deviation around the feedback law `gains`.
ChannelPolicy random_deviation(std::mt19937_64& gen,
                               const std::vector<Eigen::MatrixXd>& gains,
                               int dim_in, int dim_state, int horizon,
                               double state_scale) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double scale = std::pow(10.0, -2.0 + 2.0 * unif(gen));
  ChannelPolicy p;
  p.gains = gains;
  for (int k = 0; k <= horizon; ++k) {
    p.gains[k] += scale * random_matrix(gen, dim_in, dim_state) /
                  std::sqrt(static_cast<double>(dim_state));
    p.offsets.push_back(scale * state_scale * random_matrix(gen, dim_in, 1));
  }
  std::vector<Eigen::MatrixXd> mix;
  for (int k = 0; k <= horizon; ++k) {
    mix.push_back(scale * state_scale *
                  random_matrix(gen, dim_in, std::max(k, 1)));
  }
  p.dither = [mix](int k, const Eigen::VectorXd& past,
                   const Eigen::VectorXd&) -> Eigen::VectorXd {
    if (k == 0) return Eigen::VectorXd::Zero(mix[0].rows());
    // Products of earlier signs make the dither a nonlinear adapted
    // functional of the noise.
    Eigen::VectorXd feat(k);
    double prod = 1.0;
    for (int j = 0; j < k; ++j) {
      prod *= past(j);
      feat(j) = (j % 2 == 0) ? past(j) : prod;
    }
    return mix[k] * feat;
  };
  return p;
}

}  // namespace

void TwoInputSystem::validate() const {
  if (horizon < 0) throw DimensionError("horizon must be >= 0");
  check_family(A, horizon, H, H, "A");
  check_family(C, horizon, H, H, "C");
  check_family(B1, horizon, V, H, "B1");
  check_family(D1, horizon, V, H, "D1");
  check_family(B2, horizon, U, H, "B2");
  check_family(D2, horizon, U, H, "D2");
  check_family(Cbar, horizon, H, Z, "Cbar");
  check_family(Gbar, horizon, U, Z, "Gbar");
}

void TwoInputSystem::check_assumption2(double tol) const {
  for (int k = 0; k <= horizon; ++k) {
    const Eigen::MatrixXd gs = adjoint_matrix(Gbar[k]);
    const double r1 = max_abs(gs * Cbar[k].matrix());
    const double r2 =
        max_abs(gs * Gbar[k].matrix() -
                Eigen::MatrixXd::Identity(U.dim(), U.dim()));
    if (r1 > tol || r2 > tol) {
      std::ostringstream os;
      os << "Assumption 2 violated at k=" << k << ": ||Gbar* Cbar|| = " << r1
         << ", ||Gbar* Gbar - I|| = " << r2;
      throw AssumptionError(os.str(), k, std::max(r1, r2));
    }
  }
}

void GameParams::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw DimensionError("gamma must be in (0, inf)");
  }
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw DimensionError("rho must be in [0, inf)");
  }
}

std::string to_string(CoupledStatus s) {
  switch (s) {
    case CoupledStatus::kSolved:
      return "Solved";
    case CoupledStatus::kGameDomainFailure:
      return "GameDomainFailure";
    case CoupledStatus::kCouplingSingular:
      return "CouplingSingular";
  }
  return "unknown";
}

LinearStochasticModel to_model(const TwoInputSystem& sys) {
  LinearStochasticModel m;
  m.horizon = sys.horizon;
  m.H = sys.H;
  m.A = sys.A;
  m.C = sys.C;
  m.Z = sys.Z;
  m.Cbar = sys.Cbar;
  InputChannel v;
  v.space = sys.V;
  v.B = sys.B1;
  v.D = sys.D1;
  InputChannel u;
  u.space = sys.U;
  u.B = sys.B2;
  u.D = sys.D2;
  u.E = sys.Gbar;
  m.inputs.push_back(std::move(v));
  m.inputs.push_back(std::move(u));
  return m;
}

CoupledStep cross_coupled_step(const TwoInputSystem& sys,
                               const GameParams& params, int k,
                               const Eigen::MatrixXd& X1,
                               const Eigen::MatrixXd& X2,
                               const CoupledOptions& opts) {
  const int n = sys.H.dim();
  const int nv = sys.V.dim();
  const int nu = sys.U.dim();
  if (X1.rows() != n || X1.cols() != n || X2.rows() != n || X2.cols() != n) {
    throw DimensionError("cross_coupled_step: P(k+1) does not act on H");
  }
  const Eigen::MatrixXd& A = sys.A[k].matrix();
  const Eigen::MatrixXd& C = sys.C[k].matrix();
  const Eigen::MatrixXd& B1 = sys.B1[k].matrix();
  const Eigen::MatrixXd& D1 = sys.D1[k].matrix();
  const Eigen::MatrixXd& B2 = sys.B2[k].matrix();
  const Eigen::MatrixXd& D2 = sys.D2[k].matrix();
  const Eigen::MatrixXd B1s = adjoint_matrix(sys.B1[k]);
  const Eigen::MatrixXd D1s = adjoint_matrix(sys.D1[k]);
  const Eigen::MatrixXd B2s = adjoint_matrix(sys.B2[k]);
  const Eigen::MatrixXd D2s = adjoint_matrix(sys.D2[k]);

  CoupledStep out;
  out.R1 = selfadjoint_part(
      params.gamma * params.gamma * Eigen::MatrixXd::Identity(nv, nv) +
          B1s * X1 * B1 + D1s * X1 * D1,
      sys.V);
  out.R2 = selfadjoint_part(
      Eigen::MatrixXd::Identity(nu, nu) + B2s * X2 * B2 + D2s * X2 * D2,
      sys.U);
  out.R1_cert = certify_selfadjoint(out.R1, sys.V);
  out.R2_cert = certify_selfadjoint(out.R2, sys.U);
  if (!out.R1_cert.positive() || !out.R2_cert.positive()) {
    const bool first = !out.R1_cert.positive();
    const double me = first ? out.R1_cert.min_eig : out.R2_cert.min_eig;
    std::ostringstream os;
    os << (first ? "R1" : "R2") << "(" << k << ") is not positive (min "
       << "eigenvalue " << me << ")";
    throw GameDomainError(os.str(), k, me);
  }

  const Eigen::MatrixXd c12 = B1s * X1 * B2 + D1s * X1 * D2;
  const Eigen::MatrixXd c21 = B2s * X2 * B1 + D2s * X2 * D1;
  const Eigen::MatrixXd b1 = B1s * X1 * A + D1s * X1 * C;
  const Eigen::MatrixXd b2 = B2s * X2 * A + D2s * X2 * C;

  Eigen::MatrixXd S(nv + nu, nv + nu);
  S.topLeftCorner(nv, nv) = out.R1;
  S.topRightCorner(nv, nu) = c12;
  S.bottomLeftCorner(nu, nv) = c21;
  S.bottomRightCorner(nu, nu) = out.R2;
  Eigen::MatrixXd rhs(nv + nu, n);
  rhs.topRows(nv) = -b1;
  rhs.bottomRows(nu) = -b2;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeFullU |
                                               Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0
                          ? sv(0) / sv(sv.size() - 1)
                          : std::numeric_limits<double>::infinity();
  if (cond <= opts.kappa_max) {
    const Eigen::MatrixXd K = svd.solve(rhs);
    out.K1 = K.topRows(nv);
    out.K2 = K.bottomRows(nu);
  } else {
    out.fixed_point = true;
    const Eigen::MatrixXd R1inv =
        invert_selfadjoint_matrix(out.R1, sys.V, opts.kappa_max);
    const Eigen::MatrixXd R2inv =
        invert_selfadjoint_matrix(out.R2, sys.U, opts.kappa_max);
    Eigen::MatrixXd K1 = Eigen::MatrixXd::Zero(nv, n);
    Eigen::MatrixXd K2 = Eigen::MatrixXd::Zero(nu, n);
    bool converged = false;
    for (int it = 0; it < opts.fixed_point_max_iter; ++it) {
      const Eigen::MatrixXd K1n = -R1inv * (b1 + c12 * K2);
      const Eigen::MatrixXd K2n = -R2inv * (b2 + c21 * K1n);
      const double change =
          std::max(max_abs(K1n - K1), max_abs(K2n - K2)) /
          (1.0 + std::max(max_abs(K1n), max_abs(K2n)));
      K1 = K1n;
      K2 = K2n;
      if (!std::isfinite(change)) break;
      if (change <= opts.fixed_point_tol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      std::ostringstream os;
      os << "coupled gain system is singular at k=" << k << " (cond " << cond
         << ") and the fixed-point iteration did not converge";
      throw CouplingSingularError(os.str(), k);
    }
    out.K1 = K1;
    out.K2 = K2;
  }

  const Eigen::MatrixXd Ac1 = A + B1 * out.K1;
  const Eigen::MatrixXd Cc1 = C + D1 * out.K1;
  const Eigen::MatrixXd Ac2 = A + B2 * out.K2;
  const Eigen::MatrixXd Cc2 = C + D2 * out.K2;
  const Eigen::MatrixXd K1s = adjoint_matrix(out.K1, sys.H, sys.V);
  const Eigen::MatrixXd K2s = adjoint_matrix(out.K2, sys.H, sys.U);
  const Eigen::MatrixXd CbCb =
      adjoint_matrix(sys.Cbar[k]) * sys.Cbar[k].matrix();
  const Eigen::MatrixXd Ac1s = adjoint_matrix(Ac1, sys.H, sys.H);
  const Eigen::MatrixXd Cc1s = adjoint_matrix(Cc1, sys.H, sys.H);
  const Eigen::MatrixXd Ac2s = adjoint_matrix(Ac2, sys.H, sys.H);
  const Eigen::MatrixXd Cc2s = adjoint_matrix(Cc2, sys.H, sys.H);

  out.P1 = selfadjoint_part(Ac2s * X1 * Ac2 + Cc2s * X1 * Cc2 - K2s * out.K2 -
                                CbCb - K1s * out.R1 * out.K1,
                            sys.H);
  out.P2 = selfadjoint_part(Ac1s * X2 * Ac1 + Cc1s * X2 * Cc1 -
                                params.rho * params.rho * K1s * out.K1 + CbCb -
                                K2s * out.R2 * out.K2,
                            sys.H);
  return out;
}

CoupledSolution solve_coupled_riccati(const TwoInputSystem& sys,
                                      const GameParams& params,
                                      const Eigen::VectorXd& x0,
                                      const CoupledOptions& opts) {
  sys.validate();
  sys.check_assumption2();
  params.validate();
  if (x0.size() != sys.H.dim()) {
    throw DimensionError("solve_coupled_riccati: x0 has the wrong size");
  }
  const int N = sys.horizon;
  const int n = sys.H.dim();
  CoupledSolution sol;
  sol.P1.assign(N + 2, Eigen::MatrixXd());
  sol.P2.assign(N + 2, Eigen::MatrixXd());
  sol.K1.assign(N + 1, Eigen::MatrixXd());
  sol.K2.assign(N + 1, Eigen::MatrixXd());
  sol.R1_cert.assign(N + 1, SelfAdjointCert{});
  sol.R2_cert.assign(N + 1, SelfAdjointCert{});
  sol.fixed_point.assign(N + 1, false);
  sol.P1[N + 1] = Eigen::MatrixXd::Zero(n, n);
  sol.P2[N + 1] = Eigen::MatrixXd::Zero(n, n);
  for (int k = N; k >= 0; --k) {
    try {
      CoupledStep st = cross_coupled_step(sys, params, k, sol.P1[k + 1],
                                          sol.P2[k + 1], opts);
      sol.P1[k] = std::move(st.P1);
      sol.P2[k] = std::move(st.P2);
      sol.K1[k] = std::move(st.K1);
      sol.K2[k] = std::move(st.K2);
      sol.R1_cert[k] = st.R1_cert;
      sol.R2_cert[k] = st.R2_cert;
      sol.fixed_point[k] = st.fixed_point;
    } catch (const GameDomainError& e) {
      sol.status = CoupledStatus::kGameDomainFailure;
      sol.failed_step = k;
      sol.failed_min_eig = e.min_eig();
      sol.message = e.what();
      return sol;
    } catch (const CouplingSingularError& e) {
      sol.status = CoupledStatus::kCouplingSingular;
      sol.failed_step = k;
      sol.message = e.what();
      return sol;
    }
  }
  sol.J1 = inner(sys.H, sol.P1[0] * x0, x0);
  sol.J2 = inner(sys.H, sol.P2[0] * x0, x0);
  return sol;
}

double coupled_gain_residual(const TwoInputSystem& sys,
                             const GameParams& params,
                             const CoupledSolution& sol) {
  double worst = 0.0;
  for (int k = sys.horizon; k >= 0 && k > sol.failed_step; --k) {
    const Eigen::MatrixXd& X1 = sol.P1[k + 1];
    const Eigen::MatrixXd& X2 = sol.P2[k + 1];
    const OperatorExpr B1s = sys.B1[k].adjoint();
    const OperatorExpr D1s = sys.D1[k].adjoint();
    const OperatorExpr B2s = sys.B2[k].adjoint();
    const OperatorExpr D2s = sys.D2[k].adjoint();
    const int n = sys.H.dim();
    // R_i K_i + G_i(K_j) = 0, evaluated column by column with operator
    // application.
    for (int j = 0; j < n; ++j) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, j);
      const Eigen::VectorXd k1 = sol.K1[k] * e;
      const Eigen::VectorXd k2 = sol.K2[k] * e;
      const Eigen::VectorXd ax2 =
          sys.A[k].apply(e) + sys.B2[k].apply(k2);
      const Eigen::VectorXd cx2 =
          sys.C[k].apply(e) + sys.D2[k].apply(k2);
      const Eigen::VectorXd r1 =
          params.gamma * params.gamma * k1 +
          B1s.apply(Eigen::VectorXd(X1 * sys.B1[k].apply(k1))) +
          D1s.apply(Eigen::VectorXd(X1 * sys.D1[k].apply(k1))) +
          B1s.apply(Eigen::VectorXd(X1 * ax2)) +
          D1s.apply(Eigen::VectorXd(X1 * cx2));
      const Eigen::VectorXd ax1 =
          sys.A[k].apply(e) + sys.B1[k].apply(k1);
      const Eigen::VectorXd cx1 =
          sys.C[k].apply(e) + sys.D1[k].apply(k1);
      const Eigen::VectorXd r2 =
          k2 + B2s.apply(Eigen::VectorXd(X2 * sys.B2[k].apply(k2))) +
          D2s.apply(Eigen::VectorXd(X2 * sys.D2[k].apply(k2))) +
          B2s.apply(Eigen::VectorXd(X2 * ax1)) +
          D2s.apply(Eigen::VectorXd(X2 * cx1));
      const double scale =
          1.0 + std::max(max_abs(X1), max_abs(X2)) *
                    (1.0 + std::max(max_abs(sol.K1[k]), max_abs(sol.K2[k])));
      worst = std::max(worst, std::max(r1.cwiseAbs().maxCoeff(),
                                       r2.cwiseAbs().maxCoeff()) /
                                  scale);
    }
  }
  return worst;
}

HinfDesign hinf_design(const TwoInputSystem& sys, double gamma,
                       const CoupledOptions& opts) {
  sys.validate();
  sys.check_assumption2();
  const GameParams params{gamma, gamma};
  params.validate();
  const int N = sys.horizon;
  const int n = sys.H.dim();
  HinfDesign d;
  d.gamma = gamma;
  d.P.assign(N + 2, Eigen::MatrixXd());
  d.Ku.assign(N + 1, Eigen::MatrixXd());
  d.Kv.assign(N + 1, Eigen::MatrixXd());
  d.R1_cert.assign(N + 1, SelfAdjointCert{});
  d.R2_cert.assign(N + 1, SelfAdjointCert{});
  d.P[N + 1] = Eigen::MatrixXd::Zero(n, n);
  for (int k = N; k >= 0; --k) {
    CoupledStep st;
    try {
      st = cross_coupled_step(sys, params, k, -d.P[k + 1], d.P[k + 1], opts);
    } catch (const GameDomainError& e) {
      std::ostringstream os;
      os << "no linear feedback attains level " << gamma << ": " << e.what();
      throw DesignInfeasibleError(os.str(), k, e.min_eig());
    } catch (const CouplingSingularError& e) {
      throw DesignInfeasibleError(e.what(), k,
                                  std::numeric_limits<double>::quiet_NaN());
    }
    d.P[k] = st.P2;
    d.Ku[k] = st.K2;
    d.Kv[k] = st.K1;
    d.R1_cert[k] = st.R1_cert;
    d.R2_cert[k] = st.R2_cert;
  }
  return d;
}

DisturbedSystem closed_loop(const TwoInputSystem& sys,
                            const std::vector<Eigen::MatrixXd>& Ku) {
  sys.validate();
  if (static_cast<int>(Ku.size()) != sys.horizon + 1) {
    throw DimensionError("closed_loop: need N+1 gains");
  }
  DisturbedSystem d;
  d.horizon = sys.horizon;
  d.H = sys.H;
  d.V = sys.V;
  d.Z = sys.Z;
  for (int k = 0; k <= sys.horizon; ++k) {
    d.A.push_back(OperatorExpr::dense(
        sys.H, sys.H, sys.A[k].matrix() + sys.B2[k].matrix() * Ku[k]));
    d.C.push_back(OperatorExpr::dense(
        sys.H, sys.H, sys.C[k].matrix() + sys.D2[k].matrix() * Ku[k]));
    d.B1.push_back(sys.B1[k]);
    d.D1.push_back(sys.D1[k]);
    d.Cbar.push_back(OperatorExpr::dense(
        sys.H, sys.Z, sys.Cbar[k].matrix() + sys.Gbar[k].matrix() * Ku[k]));
    d.Dbar.push_back(OperatorExpr::zero(sys.V, sys.Z));
  }
  return d;
}

H2HinfDesign h2hinf_design(const TwoInputSystem& sys, double gamma,
                           const Eigen::VectorXd& x0,
                           const CoupledOptions& opts) {
  H2HinfDesign out;
  out.coupled = solve_coupled_riccati(sys, GameParams{gamma, 0.0}, x0, opts);
  if (gamma >= 1e6) {
    out.diagnostic =
        "gamma >= 1e6: the disturbance gain is driven to zero and the design "
        "no longer depends on gamma; this is not an H2-only design";
  }
  if (!out.coupled.solved()) return out;
  out.J2 = out.coupled.J2;
  BRLOptions brl;
  brl.kappa_max = opts.kappa_max;
  out.closed_loop_brl = brl_check(closed_loop(sys, out.coupled.K2), gamma, brl);
  out.attenuation_verified = out.closed_loop_brl.feasible;
  return out;
}

double game_index_1(const TwoInputSystem& sys, double gamma,
                    const Trajectory& tr) {
  double j = 0.0;
  for (int k = 0; k <= sys.horizon; ++k) {
    j += gamma * gamma * sq_norm(sys.V, tr.u[0][k]) - sq_norm(sys.Z, tr.z[k]);
  }
  return j;
}

double game_index_2(const TwoInputSystem& sys, double rho,
                    const Trajectory& tr) {
  double j = 0.0;
  for (int k = 0; k <= sys.horizon; ++k) {
    j += sq_norm(sys.Z, tr.z[k]) - rho * rho * sq_norm(sys.V, tr.u[0][k]);
  }
  return j;
}

NashReport verify_nash_equilibrium(const TwoInputSystem& sys,
                                   const GameParams& params,
                                   const CoupledSolution& sol,
                                   const Eigen::VectorXd& x0, int deviations,
                                   std::uint64_t seed, int workers) {
  sys.validate();
  params.validate();
  if (!sol.solved()) {
    throw StepError("verify_nash_equilibrium needs a solved coupled pair",
                    sol.failed_step);
  }
  if (sys.horizon > kMaxNashHorizon) {
    throw EnumerationLimitError("verify_nash_equilibrium: N = " +
                                std::to_string(sys.horizon) + " exceeds " +
                                std::to_string(kMaxNashHorizon));
  }
  const LinearStochasticModel model = to_model(sys);
  const Functional f1 = [&](const Trajectory& tr) {
    return game_index_1(sys, params.gamma, tr);
  };
  const Functional f2 = [&](const Trajectory& tr) {
    return game_index_2(sys, params.rho, tr);
  };
  Policy eq;
  eq.channels.resize(2);
  eq.channels[0].gains = sol.K1;
  eq.channels[1].gains = sol.K2;

  NashReport rep;
  rep.J1 = enumerate_expectation(model, eq, x0, f1, workers);
  rep.J2 = enumerate_expectation(model, eq, x0, f2, workers);
  rep.J1_riccati = sol.J1;
  rep.J2_riccati = sol.J2;
  rep.worst_margin = std::numeric_limits<double>::infinity();

  const double xs = std::sqrt(sq_norm(sys.H, x0)) + 1.0;
  std::mt19937_64 gen(seed);
  for (int player = 1; player <= 2; ++player) {
    for (int i = 0; i <= deviations; ++i) {
      Policy dev = eq;
      // i = 0 is the zero deviation.
      if (i > 0) {
        const int ch = player == 1 ? 0 : 1;
        const int dim = player == 1 ? sys.V.dim() : sys.U.dim();
        dev.channels[ch] =
            random_deviation(gen, dev.channels[ch].gains, dim, sys.H.dim(),
                             sys.horizon, xs / std::sqrt(sys.H.dim()));
      }
      NashDeviation d;
      d.player = player;
      if (player == 1) {
        d.value = enumerate_expectation(model, dev, x0, f1, workers);
        d.margin = d.value - rep.J1;
      } else {
        d.value = enumerate_expectation(model, dev, x0, f2, workers);
        d.margin = d.value - rep.J2;
      }
      const double scale = 1.0 + std::abs(player == 1 ? rep.J1 : rep.J2);
      rep.worst_margin = std::min(rep.worst_margin, d.margin / scale);
      rep.samples.push_back(d);
    }
  }
  rep.deviations = deviations;
  return rep;
}

}  // namespace hilbertctl
