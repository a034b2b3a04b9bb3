// Acceptance checks. Each criterion prints one line:
//   criterion <n> [PASS|FAIL] <title>: <details>
// Usage: acceptance [--criterion N]   (no argument runs all nine)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hilbertctl/errors.hpp"
#include "hilbertctl/examples.hpp"
#include "hilbertctl/game.hpp"
#include "hilbertctl/hinf.hpp"
#include "hilbertctl/lq.hpp"
#include "hilbertctl/riccati.hpp"
#include "support/random_systems.hpp"

using namespace hilbertctl;
using namespace hilbertctl::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string details;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

int workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string failed_comparisons(const ExampleReport& r) {
  std::string s;
  for (const auto& c : r.comparisons) {
    if (c.pass) continue;
    if (!s.empty()) s += "; ";
    s += c.name + " computed " + fmt(c.computed) + " vs " + fmt(c.reference);
  }
  return s;
}

Outcome example_criterion(const std::string& id, double limit) {
  const auto t0 = Clock::now();
  ExampleOptions opts;
  opts.workers = workers();
  const ExampleReport r = run_example(id, opts);
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = r.all_pass() && dt < limit;
  int passed = 0;
  for (const auto& c : r.comparisons) passed += c.pass;
  o.details = std::to_string(passed) + "/" +
              std::to_string(r.comparisons.size()) + " comparisons pass, " +
              fmt(dt) + " s";
  if (!r.all_pass()) o.details += "; failing: " + failed_comparisons(r);
  if (dt >= limit) o.details += "; runtime limit " + fmt(limit) + " s exceeded";
  return o;
}

// 1 ------------------------------------------------------------------------
Outcome criterion1() { return example_criterion("ex1", 10.0); }

// 2 ------------------------------------------------------------------------
Outcome criterion2() { return example_criterion("ex2", 10.0); }

// 3 ------------------------------------------------------------------------
Outcome criterion3() {
  const auto t0 = Clock::now();
  const DisturbedSystem sys = example3_system();
  NormOptions no;
  no.tol_gamma = 1e-7;
  const double norm = hinf_norm(sys, no).norm;
  const double norm_err = std::abs(norm - example3_norm());
  BRLOptions diag;
  diag.continue_through_indefinite = true;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double g = 1.3 + 1.2 * i / 19.0;
    const BRLRun run = brl_check(sys, g, diag);
    for (int k = 0; k <= sys.horizon; ++k) {
      const double e = run.computed[k]
                           ? std::abs(run.pi3[k].min_eig - example3_rho_min(k, g))
                           : std::numeric_limits<double>::infinity();
      worst = std::max(worst, e);
    }
  }
  const double dt = seconds_since(t0);
  Outcome o;
  o.pass = norm_err <= 1e-4 && worst <= 1e-10 && dt < 5.0;
  o.details = "norm " + fmt(norm) + " (error " + fmt(norm_err) +
              "), max rho_min error " + fmt(worst) + " over 20 gammas, " +
              fmt(dt) + " s";
  return o;
}

// 4 ------------------------------------------------------------------------
Outcome criterion4() {
  const int n = 64;
  const TwoInputSystem sys = example4_system(n);
  const Eigen::VectorXd x0 = example4_x0(n);
  double worst = 0.0;
  for (double g : {2.0, 2.5, 3.0}) {
    for (double r : {0.0, 0.5, 1.0}) {
      const CoupledSolution s = solve_coupled_riccati(sys, {g, r}, x0);
      if (!s.solved()) return {false, "coupled recursion failed at gamma " +
                                          fmt(g) + ", rho " + fmt(r)};
      const Ex4Expected e = example4_expected(g, r, n);
      worst = std::max({worst, (s.P1[0] - e.P1).cwiseAbs().maxCoeff(),
                        (s.P2[0] - e.P2).cwiseAbs().maxCoeff(),
                        (s.K1[0] - e.K1).cwiseAbs().maxCoeff(),
                        (s.K2[0] - e.K2).cwiseAbs().maxCoeff()});
    }
  }
  double zs = 0.0;
  for (double g : {2.0, 2.5, 3.0}) {
    const CoupledSolution s = solve_coupled_riccati(sys, {g, g}, x0);
    if (!s.solved()) return {false, "zero-sum recursion failed"};
    for (std::size_t k = 0; k < s.P1.size(); ++k) {
      zs = std::max(zs, (s.P1[k] + s.P2[k]).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-10 && zs <= 1e-10,
          "max closed-form error " + fmt(worst) + " on 9 grid points, max " +
              "|P1+P2| " + fmt(zs) + " at gamma = rho"};
}

// 5 ------------------------------------------------------------------------
Policy random_admissible_policy(Rng& g, const ControlledSystem& s) {
  Policy p;
  p.channels.resize(1);
  ChannelPolicy& c = p.channels[0];
  const int m = s.U.dim();
  for (int k = 0; k <= s.horizon; ++k) {
    c.gains.push_back(gaussian(g, m, s.H.dim(), 0.5));
    c.offsets.push_back(gaussian_vector(g, m, 0.5));
  }
  const Eigen::VectorXd dir = gaussian_vector(g, m, 0.5);
  const double freq = uniform(g, 0.5, 2.0);
  c.dither = [dir, freq](int k, const Eigen::VectorXd& past,
                         const Eigen::VectorXd& x) {
    const double s = past.size() ? past.sum() : 0.0;
    return Eigen::VectorXd(dir * std::tanh(freq * s + 0.1 * k) *
                           std::cos(x.size() ? x(0) : 0.0));
  };
  return p;
}

Outcome criterion5() {
  const auto t0 = Clock::now();
  Rng g(5005);
  double worst = 0.0;
  int done = 0;
  int skipped = 0;
  while (done < 100) {
    const int n = uniform_int(g, 1, 6);
    const int m = uniform_int(g, 1, 3);
    const int N = uniform_int(g, 0, 6);
    LQProblem prob;
    prob.sys = random_controlled(g, n, m, N);
    prob.cost = random_indefinite_cost(g, prob.sys);
    prob.x0 = gaussian_vector(g, n);
    const RiccatiSolution ric = solve_backward_riccati(prob.sys, prob.cost);
    if (ric.status == RiccatiStatus::kDomainFailure) {
      ++skipped;
      continue;
    }
    const CompletingSquareReport rep = completing_square_residual(
        prob, ric, random_admissible_policy(g, prob.sys), workers());
    worst = std::max(worst, rep.relative);
    ++done;
  }
  const double dt = seconds_since(t0);
  return {worst <= 1e-8 && dt < 60.0,
          "100 specs, max relative identity residual " + fmt(worst) + " (" +
              std::to_string(skipped) + " resampled after a domain failure), " +
              fmt(dt) + " s"};
}

// 6 ------------------------------------------------------------------------
Outcome criterion6() {
  const auto t0 = Clock::now();
  Rng g(6006);
  int unsolved = 0;
  int hypotheses_failed = 0;
  double min_p = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    const int n = uniform_int(g, 1, 6);
    const int m = uniform_int(g, 1, 3);
    const int N = uniform_int(g, 0, 8);
    const ControlledSystem sys = random_controlled(g, n, m, N, false);
    const QuadraticCost cost = random_theorem2_cost(g, sys);
    if (!check_theorem2(sys, cost).all_pass()) {
      ++hypotheses_failed;
      continue;
    }
    const RiccatiSolution sol = solve_backward_riccati(sys, cost);
    if (!sol.solved()) {
      ++unsolved;
      continue;
    }
    for (const auto& P : sol.P) {
      min_p = std::min(min_p, certify_selfadjoint(P, sys.H).min_eig);
    }
  }
  const double dt = seconds_since(t0);
  return {unsolved == 0 && hypotheses_failed == 0 && min_p >= -1e-8 &&
              dt < 60.0,
          "200 specs, " + std::to_string(unsolved) + " not solved, " +
              std::to_string(hypotheses_failed) +
              " generator rejects, min eig P(k) " + fmt(min_p) + ", " +
              fmt(dt) + " s"};
}

// 7 ------------------------------------------------------------------------
Outcome criterion7() {
  Rng g(7007);
  double worst = 0.0;
  int non_monotone = 0;
  int zero_maps = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = uniform_int(g, 1, 6);
    const int nv = uniform_int(g, 1, 3);
    const int N = uniform_int(g, 0, 6);
    const DisturbedSystem sys = random_deterministic_disturbed(g, n, nv, N);
    NormOptions no;
    no.tol_gamma = 1e-7;
    const double bis = hinf_norm(sys, no).norm;
    const double svd = deterministic_norm_oracle(sys).norm;
    worst = std::max(worst, std::abs(bis - svd));
    // A zero input-output map has no natural scale; sweep around 1 instead.
    const double scale = svd > 0.0 ? svd : 1.0;
    zero_maps += svd == 0.0;
    bool seen_feasible = false;
    for (int j = 0; j < 10; ++j) {
      const double gam = scale * (0.5 + 0.1 * j + 0.013);
      const bool f = brl_check(sys, gam).feasible;
      if (seen_feasible && !f) ++non_monotone;
      seen_feasible = seen_feasible || f;
    }
  }
  return {worst <= 1e-5 && non_monotone == 0,
          "100 systems, max |bisection - SVD| " + fmt(worst) + ", " +
              std::to_string(non_monotone) + " monotonicity violations, " +
              std::to_string(zero_maps) + " zero maps"};
}

// 8 ------------------------------------------------------------------------
Outcome criterion8() {
  Rng g(8008);
  int successes = 0;
  int failures = 0;
  int unsound = 0;
  int no_witness = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  int attempts = 0;
  while ((successes < 50 || failures < 20) && attempts < 5000) {
    ++attempts;
    const int n = uniform_int(g, 1, 5);
    const int nu = uniform_int(g, 1, 2);
    const int nv = uniform_int(g, 1, 2);
    const int N = uniform_int(g, 0, 5);
    const bool want_failure = successes >= 50 ||
                              (failures < 20 && uniform_int(g, 0, 1) == 0);
    const TwoInputSystem sys =
        random_two_input(g, n, nu, nv, N, !want_failure);
    const double gamma = want_failure ? uniform(g, 0.05, 1.0)
                                      : uniform(g, 0.5, 6.0);
    try {
      const HinfDesign d = hinf_design(sys, gamma);
      if (successes >= 50) continue;
      ++successes;
      if (!brl_check(closed_loop(sys, d.Ku), gamma).feasible) ++unsound;
    } catch (const DesignInfeasibleError&) {
      if (failures >= 20 || !want_failure) continue;
      ++failures;
      // Every linear feedback must leave a disturbance with gain >= gamma;
      // check u = 0 and a few random gains.
      for (int t = 0; t < 4; ++t) {
        std::vector<Eigen::MatrixXd> K(
            N + 1, Eigen::MatrixXd::Zero(nu, n));
        if (t > 0) {
          for (auto& k : K) k = gaussian(g, nu, n, 0.5);
        }
        const DisturbedSystem cl = closed_loop(sys, K);
        const OracleResult orc = deterministic_norm_oracle(cl);
        const double gain =
            disturbance_gain(cl, orc.witness, Eigen::VectorXd::Zero(N + 1));
        min_ratio = std::min(min_ratio, gain / gamma);
        if (gain < gamma * (1.0 - 1e-9)) ++no_witness;
      }
    }
  }
  const bool enough = successes == 50 && failures == 20;
  return {enough && unsound == 0 && no_witness == 0,
          std::to_string(successes) + " designs, " + std::to_string(unsound) +
              " failed the closed-loop check; " + std::to_string(failures) +
              " infeasible levels, " + std::to_string(no_witness) +
              " controllers without a witness (min gain/gamma " +
              fmt(min_ratio) + ")"};
}

// 9 ------------------------------------------------------------------------
Outcome criterion9() {
  double worst = std::numeric_limits<double>::infinity();
  {
    const TwoInputSystem sys = example4_system(64);
    const Eigen::VectorXd x0 = example4_x0(64);
    const GameParams p{2.0, 0.0};
    const CoupledSolution sol = solve_coupled_riccati(sys, p, x0);
    if (!sol.solved()) return {false, "example game not solved"};
    worst = verify_nash_equilibrium(sys, p, sol, x0, 50, 9, workers())
                .worst_margin;
  }
  Rng g(9009);
  int solved = 0;
  int attempts = 0;
  while (solved < 20 && attempts < 500) {
    ++attempts;
    const int n = uniform_int(g, 1, 4);
    const TwoInputSystem sys = random_two_input(
        g, n, uniform_int(g, 1, 2), uniform_int(g, 1, 2),
        uniform_int(g, 0, 8), uniform_int(g, 0, 1) == 1);
    const GameParams p{uniform(g, 1.0, 5.0), uniform(g, 0.0, 1.5)};
    const Eigen::VectorXd x0 = gaussian_vector(g, n);
    const CoupledSolution sol = solve_coupled_riccati(sys, p, x0);
    if (!sol.solved()) continue;
    ++solved;
    worst = std::min(worst, verify_nash_equilibrium(sys, p, sol, x0, 50,
                                                    1000 + solved, workers())
                                .worst_margin);
  }
  return {solved == 20 && worst >= -1e-8,
          "example + " + std::to_string(solved) +
              " random games, worst relative margin " + fmt(worst)};
}

struct Criterion {
  const char* title;
  std::function<Outcome()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> c = {
      {"Example 1 reproduction", criterion1},
      {"Example 2 reproduction, three cases", criterion2},
      {"Example 3 norm and rho_min closed forms", criterion3},
      {"Example 4 closed forms and zero-sum identity", criterion4},
      {"completing-squares identity suite", criterion5},
      {"nonnegative-cost property suite", criterion6},
      {"deterministic norm oracle agreement", criterion7},
      {"H-infinity design soundness", criterion8},
      {"Nash verification", criterion9},
  };
  return c;
}

bool run_one(int i) {
  const Criterion& c = criteria()[i - 1];
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::cout << "criterion " << i << " [" << (o.pass ? "PASS" : "FAIL") << "] "
            << c.title << ": " << o.details << std::endl;
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int a = 1; a < argc; ++a) {
    const std::string arg = argv[a];
    if (arg == "--criterion" && a + 1 < argc) {
      which.push_back(std::atoi(argv[++a]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]\n";
      return 2;
    }
  }
  if (which.empty()) {
    for (int i = 1; i <= static_cast<int>(criteria().size()); ++i) {
      which.push_back(i);
    }
  }
  int failed = 0;
  for (int i : which) {
    if (i < 1 || i > static_cast<int>(criteria().size())) {
      std::cerr << "no criterion " << i << "\n";
      return 2;
    }
    failed += !run_one(i);
  }
  if (which.size() > 1) {
    std::cout << (which.size() - failed) << "/" << which.size()
              << " criteria pass" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
