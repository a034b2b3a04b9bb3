#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "hilbertctl/errors.hpp"
#include "hilbertctl/examples.hpp"
#include "hilbertctl/outputs.hpp"
#include "hilbertctl/serialize.hpp"

namespace hc = hilbertctl;
using hc::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitParse = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitLimit = 4;

struct Config {
  std::string system;
  std::string cost;
  std::string x0;
  std::optional<double> gamma;
  std::optional<double> rho;
  std::uint64_t seed = 1;
  std::string out;
  std::optional<double> tol_gamma;
  std::optional<int> dim;
  int workers = 0;
  std::string example_id;
  std::string policy = "zero";
  std::string noise = "gaussian";
  int replications = 1;
  bool verify = false;
};

int worker_count(const Config& c) {
  if (c.workers > 0) return c.workers;
  return std::max(1u, std::thread::hardware_concurrency());
}

hc::SystemDoc load_system(const Config& c, hc::SystemType want) {
  if (c.system.empty()) throw hc::ParseError("--system is required");
  hc::SystemDoc doc = hc::parse_system_file(c.system);
  if (doc.type != want) {
    throw hc::ParseError("'" + c.system + "' holds a " + to_string(doc.type) +
                         " system, this command needs " + to_string(want));
  }
  for (const auto& w : doc.warnings) std::cerr << "warning: " << w << "\n";
  return doc;
}

Eigen::VectorXd load_x0(const Config& c, const hc::SystemDoc& doc,
                        const hc::Space& H) {
  if (!c.x0.empty()) {
    std::vector<std::string> warnings;
    Eigen::VectorXd x = hc::parse_x0(hc::read_json_file(c.x0), H, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    return x;
  }
  if (doc.x0) return *doc.x0;
  throw hc::ParseError("no initial state: pass --x0 or add 'x0' to the system");
}

double require_gamma(const Config& c) {
  if (!c.gamma) throw hc::ParseError("--gamma is required");
  if (!(*c.gamma > 0.0)) throw hc::ParseError("--gamma must be > 0");
  return *c.gamma;
}

hc::GameParams game_params(const Config& c) {
  hc::GameParams p{require_gamma(c), c.rho.value_or(0.0)};
  if (!(p.rho >= 0.0)) throw hc::ParseError("--rho must be >= 0");
  return p;
}

std::string gains_csv(const std::vector<Eigen::MatrixXd>& K) {
  std::ostringstream os;
  os << "k,row,col,value\n";
  for (std::size_t k = 0; k < K.size(); ++k) {
    for (int i = 0; i < K[k].rows(); ++i) {
      for (int j = 0; j < K[k].cols(); ++j) {
        os << k << ',' << i << ',' << j << ',' << hc::csv_number(K[k](i, j))
           << '\n';
      }
    }
  }
  return os.str();
}

struct Outcome {
  hc::RunResult result;
  int code = kExitOk;
};

// ---------------------------------------------------------------- commands

Outcome cmd_lq_solve(const Config& c) {
  hc::SystemDoc doc = load_system(c, hc::SystemType::kControlled);
  hc::LQProblem prob;
  prob.sys = *doc.controlled;
  if (!c.cost.empty()) {
    prob.cost = hc::parse_cost(hc::read_json_file(c.cost), prob.sys,
                               doc.spaces);
  } else if (doc.cost) {
    prob.cost = *doc.cost;
  } else {
    throw hc::ParseError("no cost: pass --cost or add 'cost' to the system");
  }
  prob.x0 = load_x0(c, doc, prob.sys.H);
  const hc::LQSolution sol = hc::solve_lq(prob);
  const hc::WellPosedness wp = hc::well_posedness_certificate(prob);
  Outcome o;
  json& r = o.result.report;
  r["command"] = "lq-solve";
  r["solution"] = hc::to_json(sol);
  r["well_posed"] = {{"certified", wp.certified},
                     {"lower_bound", wp.lower_bound ? json(*wp.lower_bound)
                                                    : json(nullptr)},
                     {"reason", wp.reason}};
  r["sufficient_conditions"] =
      hc::to_json(hc::check_theorem2(prob.sys, prob.cost));
  o.result.summary.push_back("riccati status: " +
                             to_string(sol.riccati.status));
  if (sol.riccati.solved()) {
    const Eigen::VectorXd noise = Eigen::VectorXd::Zero(prob.sys.horizon + 1);
    const hc::Trajectory tr = hc::simulate(
        hc::to_model(prob.sys), hc::feedback_policy(sol.gains), prob.x0, noise);
    json u = json::array();
    for (const auto& uk : tr.u[0]) u.push_back(hc::vector_to_json(uk));
    r["noiseless_inputs"] = u;
    r["recursion_residual"] =
        hc::recursion_residual(prob.sys, prob.cost, sol.riccati);
    o.result.tables.push_back({"states.csv", hc::states_csv(tr.x)});
    o.result.tables.push_back({"gains.csv", gains_csv(sol.gains)});
    o.result.summary.push_back("optimal value: " +
                               hc::csv_number(sol.optimal_value));
  } else {
    o.result.summary.push_back(sol.riccati.message);
    o.code = kExitInfeasible;
  }
  return o;
}

Outcome cmd_brl_check(const Config& c) {
  const hc::SystemDoc doc = load_system(c, hc::SystemType::kDisturbed);
  const double gamma = require_gamma(c);
  const hc::BRLRun run = hc::brl_check(*doc.disturbed, gamma);
  Outcome o;
  o.result.report["command"] = "brl-check";
  o.result.report["run"] = hc::to_json(run, true);
  o.result.summary.push_back("gamma " + hc::csv_number(gamma) + ": " +
                             (run.feasible ? "feasible" : "infeasible"));
  if (!run.feasible) {
    o.result.summary.push_back(run.message);
    o.code = kExitInfeasible;
  }
  return o;
}

Outcome cmd_hinf_norm(const Config& c) {
  const hc::SystemDoc doc = load_system(c, hc::SystemType::kDisturbed);
  hc::NormOptions opts;
  if (c.tol_gamma) opts.tol_gamma = *c.tol_gamma;
  if (c.gamma) opts.gamma_hi = *c.gamma;
  const hc::NormResult nr = hc::hinf_norm(*doc.disturbed, opts);
  Outcome o;
  o.result.report["command"] = "hinf-norm";
  o.result.report["result"] = hc::to_json(nr);
  o.result.report["tol_gamma"] = opts.tol_gamma;
  if (doc.disturbed->deterministic()) {
    o.result.report["deterministic_oracle"] =
        hc::deterministic_norm_oracle(*doc.disturbed).norm;
  }
  o.result.summary.push_back("norm: " + hc::csv_number(nr.norm));
  return o;
}

Outcome cmd_nash_solve(const Config& c) {
  const hc::SystemDoc doc = load_system(c, hc::SystemType::kTwoInput);
  const hc::TwoInputSystem& sys = *doc.two_input;
  const hc::GameParams p = game_params(c);
  const Eigen::VectorXd x0 = load_x0(c, doc, sys.H);
  const hc::CoupledSolution sol = hc::solve_coupled_riccati(sys, p, x0);
  Outcome o;
  json& r = o.result.report;
  r["command"] = "nash-solve";
  r["gamma"] = p.gamma;
  r["rho"] = p.rho;
  r["solution"] = hc::to_json(sol);
  o.result.summary.push_back("status: " + to_string(sol.status));
  if (!sol.solved()) {
    o.result.summary.push_back(sol.message);
    o.code = kExitInfeasible;
    return o;
  }
  r["gain_residual"] = hc::coupled_gain_residual(sys, p, sol);
  o.result.tables.push_back({"v_gains.csv", gains_csv(sol.K1)});
  o.result.tables.push_back({"u_gains.csv", gains_csv(sol.K2)});
  o.result.summary.push_back("J1 = " + hc::csv_number(sol.J1) +
                             ", J2 = " + hc::csv_number(sol.J2));
  if (c.verify) {
    const hc::NashReport rep = hc::verify_nash_equilibrium(
        sys, p, sol, x0, 50, c.seed, worker_count(c));
    r["verification"] = hc::to_json(rep);
    o.result.summary.push_back("worst relative margin: " +
                               hc::csv_number(rep.worst_margin));
  }
  return o;
}

Outcome cmd_hinf_design(const Config& c) {
  const hc::SystemDoc doc = load_system(c, hc::SystemType::kTwoInput);
  const hc::TwoInputSystem& sys = *doc.two_input;
  const double gamma = require_gamma(c);
  const hc::HinfDesign d = hc::hinf_design(sys, gamma);
  const hc::BRLRun check = hc::brl_check(hc::closed_loop(sys, d.Ku), gamma);
  Outcome o;
  o.result.report["command"] = "hinf-design";
  o.result.report["design"] = hc::to_json(d);
  o.result.report["closed_loop_brl"] = hc::to_json(check);
  o.result.tables.push_back({"u_gains.csv", gains_csv(d.Ku)});
  o.result.tables.push_back({"v_gains.csv", gains_csv(d.Kv)});
  o.result.summary.push_back("design at gamma " + hc::csv_number(gamma) +
                             " found; closed-loop check " +
                             (check.feasible ? "passes" : "FAILS"));
  return o;
}

Outcome cmd_h2hinf_design(const Config& c) {
  const hc::SystemDoc doc = load_system(c, hc::SystemType::kTwoInput);
  const hc::TwoInputSystem& sys = *doc.two_input;
  const double gamma = require_gamma(c);
  const Eigen::VectorXd x0 = load_x0(c, doc, sys.H);
  const hc::H2HinfDesign d = hc::h2hinf_design(sys, gamma, x0);
  Outcome o;
  o.result.report["command"] = "h2hinf-design";
  o.result.report["gamma"] = gamma;
  o.result.report["design"] = hc::to_json(d);
  if (!d.diagnostic.empty()) o.result.summary.push_back(d.diagnostic);
  if (!d.coupled.solved()) {
    o.result.summary.push_back(d.coupled.message);
    o.code = kExitInfeasible;
    return o;
  }
  o.result.tables.push_back({"u_gains.csv", gains_csv(d.coupled.K2)});
  o.result.tables.push_back({"v_gains.csv", gains_csv(d.coupled.K1)});
  o.result.summary.push_back("J2 = " + hc::csv_number(d.J2) +
                             "; attenuation " +
                             (d.attenuation_verified ? "verified"
                                                     : "NOT verified"));
  return o;
}

Outcome cmd_simulate(const Config& c) {
  if (c.system.empty()) throw hc::ParseError("--system is required");
  hc::SystemDoc doc = hc::parse_system_file(c.system);
  for (const auto& w : doc.warnings) std::cerr << "warning: " << w << "\n";
  const hc::NoiseKind kind = hc::noise_kind_from_string(c.noise);
  if (c.replications < 1) throw hc::ParseError("--replications must be >= 1");

  hc::LinearStochasticModel model;
  hc::Policy policy;
  std::optional<hc::Functional> cost;
  std::optional<double> value;
  Eigen::VectorXd x0;
  switch (doc.type) {
    case hc::SystemType::kControlled: {
      const auto& sys = *doc.controlled;
      model = hc::to_model(sys);
      x0 = load_x0(c, doc, sys.H);
      policy.channels.resize(1);
      if (doc.cost) cost = hc::lq_cost_functional(sys, *doc.cost);
      if (c.policy == "lq") {
        if (!doc.cost) throw hc::ParseError("policy 'lq' needs a cost");
        const hc::LQSolution sol = hc::solve_lq({sys, *doc.cost, x0});
        if (!sol.riccati.solved()) {
          throw hc::DomainError("policy 'lq': " + sol.riccati.message,
                                sol.riccati.failed_step);
        }
        policy = hc::feedback_policy(sol.gains);
        value = sol.optimal_value;
      } else if (c.policy != "zero") {
        throw hc::ParseError("controlled systems take --policy zero or lq");
      }
      break;
    }
    case hc::SystemType::kDisturbed: {
      model = hc::to_model(*doc.disturbed);
      x0 = load_x0(c, doc, doc.disturbed->H);
      policy.channels.resize(1);
      if (c.policy != "zero") {
        throw hc::ParseError("disturbed systems take --policy zero");
      }
      break;
    }
    case hc::SystemType::kTwoInput: {
      const auto& sys = *doc.two_input;
      model = hc::to_model(sys);
      x0 = load_x0(c, doc, sys.H);
      policy.channels.resize(2);
      if (c.policy == "nash") {
        const hc::GameParams p = game_params(c);
        const hc::CoupledSolution sol = hc::solve_coupled_riccati(sys, p, x0);
        if (!sol.solved()) {
          throw hc::GameDomainError("policy 'nash': " + sol.message,
                                    sol.failed_step, sol.failed_min_eig);
        }
        policy.channels[0].gains = sol.K1;
        policy.channels[1].gains = sol.K2;
      } else if (c.policy == "hinf") {
        const hc::HinfDesign d = hc::hinf_design(sys, require_gamma(c));
        policy.channels[0].gains = d.Kv;
        policy.channels[1].gains = d.Ku;
      } else if (c.policy != "zero") {
        throw hc::ParseError("two-input systems take --policy zero, nash or "
                             "hinf");
      }
      break;
    }
  }

  const int N = model.horizon;
  const Eigen::VectorXd noise = hc::noise_path(kind, c.seed, 0, N);
  const hc::Trajectory tr = hc::simulate(model, policy, x0, noise);
  Outcome o;
  json& r = o.result.report;
  r["command"] = "simulate";
  r["system_type"] = to_string(doc.type);
  r["policy"] = c.policy;
  r["noise"] = {{"kind", to_string(kind)},
                {"seed", c.seed},
                {"path", hc::vector_to_json(noise)}};
  json norms = json::array();
  for (const auto& x : tr.x) norms.push_back(std::sqrt(hc::sq_norm(model.H, x)));
  r["state_norms"] = norms;
  std::ostringstream ns;
  ns << "k,w\n";
  for (int k = 0; k < noise.size(); ++k) {
    ns << k << ',' << hc::csv_number(noise(k)) << '\n';
  }
  o.result.tables.push_back({"trajectory.csv", hc::states_csv(tr.x)});
  o.result.tables.push_back({"noise.csv", ns.str()});
  if (!tr.z.empty()) o.result.tables.push_back({"outputs.csv",
                                                hc::states_csv(tr.z)});
  if (cost) {
    r["pathwise_cost"] = (*cost)(tr);
    if (c.replications > 1) {
      const hc::MonteCarloResult mc = hc::monte_carlo_expectation(
          model, policy, x0, *cost, c.replications, c.seed, kind,
          worker_count(c));
      r["monte_carlo"] = {{"mean", mc.mean},
                          {"half_width_95", mc.half_width},
                          {"replications", mc.replications}};
      o.result.summary.push_back("E[cost] ~ " + hc::csv_number(mc.mean) +
                                 " +- " + hc::csv_number(mc.half_width));
    }
    if (value) r["riccati_value"] = *value;
  }
  o.result.summary.push_back("simulated " + std::to_string(N + 1) +
                             " steps with " + to_string(kind) + " noise");
  return o;
}

Outcome cmd_example(const Config& c) {
  hc::ExampleOptions opts;
  opts.dim = c.dim;
  opts.gamma = c.gamma;
  opts.rho = c.rho;
  if (c.tol_gamma) opts.tol_gamma = *c.tol_gamma;
  opts.seed = c.seed;
  opts.workers = worker_count(c);
  const hc::ExampleReport rep = hc::run_example(c.example_id, opts);
  Outcome o;
  o.result = hc::to_run_result(rep);
  return o;
}

void finish(const Config& c, const Outcome& o) {
  if (c.out.empty()) {
    std::cout << hc::dump_json(o.result.report);
  } else {
    for (const auto& f : hc::emit_outputs(o.result, c.out)) {
      std::cout << c.out << "/" << f << "\n";
    }
  }
  for (const auto& line : o.result.summary) std::cerr << line << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-horizon stochastic LQ, H-infinity and Nash synthesis "
               "on truncated Hilbert spaces"};
  app.require_subcommand(1);
  Config cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", cfg.out, "Output directory");
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_option("--workers", cfg.workers, "Worker threads (0 = all)");
  };
  auto add_system = [&](CLI::App* sub) {
    sub->add_option("--system", cfg.system, "System JSON file")->required();
  };
  auto add_gamma = [&](CLI::App* sub, bool required) {
    auto* opt = sub->add_option("--gamma", cfg.gamma, "Attenuation level");
    if (required) opt->required();
  };

  auto* lq = app.add_subcommand("lq-solve", "Optimal LQ feedback and value");
  add_system(lq);
  lq->add_option("--cost", cfg.cost, "Cost JSON file");
  lq->add_option("--x0", cfg.x0, "Initial state JSON file");
  add_common(lq);

  auto* brl = app.add_subcommand("brl-check", "Bounded real lemma test");
  add_system(brl);
  add_gamma(brl, true);
  add_common(brl);

  auto* norm = app.add_subcommand("hinf-norm", "Perturbation operator norm");
  add_system(norm);
  add_gamma(norm, false);
  norm->add_option("--tol-gamma", cfg.tol_gamma, "Bisection tolerance");
  add_common(norm);

  auto* nash = app.add_subcommand("nash-solve", "Coupled Riccati Nash pair");
  add_system(nash);
  add_gamma(nash, true);
  nash->add_option("--rho", cfg.rho, "Disturbance weight in J2");
  nash->add_option("--x0", cfg.x0, "Initial state JSON file");
  nash->add_flag("--verify", cfg.verify,
                 "Check unilateral deviations by enumeration");
  add_common(nash);

  auto* hd = app.add_subcommand("hinf-design", "Zero-sum H-infinity design");
  add_system(hd);
  add_gamma(hd, true);
  add_common(hd);

  auto* h2 = app.add_subcommand("h2hinf-design", "Mixed H2/H-infinity design");
  add_system(h2);
  add_gamma(h2, true);
  h2->add_option("--x0", cfg.x0, "Initial state JSON file");
  add_common(h2);

  auto* sim = app.add_subcommand("simulate", "Forward simulation");
  add_system(sim);
  sim->add_option("--x0", cfg.x0, "Initial state JSON file");
  sim->add_option("--policy", cfg.policy, "zero, lq, nash or hinf");
  sim->add_option("--noise", cfg.noise, "gaussian or rademacher");
  sim->add_option("--replications", cfg.replications,
                  "Monte Carlo replications for the cost");
  add_gamma(sim, false);
  sim->add_option("--rho", cfg.rho, "Disturbance weight for --policy nash");
  add_common(sim);

  auto* ex = app.add_subcommand("example", "Run a worked example");
  ex->add_option("id", cfg.example_id, "ex1, ex2, ex2-case1..3, ex3, ex4")
      ->required();
  ex->add_option("--dim", cfg.dim, "Truncation dimension");
  add_gamma(ex, false);
  ex->add_option("--rho", cfg.rho, "Disturbance weight (ex4)");
  ex->add_option("--tol-gamma", cfg.tol_gamma, "Bisection tolerance (ex3)");
  add_common(ex);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitParse;
  }

  try {
    Outcome o;
    if (*lq) o = cmd_lq_solve(cfg);
    else if (*brl) o = cmd_brl_check(cfg);
    else if (*norm) o = cmd_hinf_norm(cfg);
    else if (*nash) o = cmd_nash_solve(cfg);
    else if (*hd) o = cmd_hinf_design(cfg);
    else if (*h2) o = cmd_h2hinf_design(cfg);
    else if (*sim) o = cmd_simulate(cfg);
    else o = cmd_example(cfg);
    finish(cfg, o);
    return o.code;
  } catch (const hc::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const hc::AssumptionError& e) {
    std::cerr << "assumption violated at k=" << e.step() << " (residual "
              << e.residual() << "): " << e.what() << "\n";
    return kExitParse;
  } catch (const hc::ResolutionError& e) {
    std::cerr << "resolution limit: " << e.what() << "\n";
    return kExitLimit;
  } catch (const hc::EnumerationLimitError& e) {
    std::cerr << "enumeration limit: " << e.what() << "\n";
    return kExitLimit;
  } catch (const hc::DesignInfeasibleError& e) {
    std::cerr << "infeasible at k=" << e.step() << " (min eigenvalue "
              << e.min_eig() << "): " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const hc::GameDomainError& e) {
    std::cerr << "infeasible at k=" << e.step() << " (min eigenvalue "
              << e.min_eig() << "): " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const hc::StepError& e) {
    std::cerr << "infeasible at k=" << e.step() << ": " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const hc::BracketError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const hc::DimensionError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const hc::NotSelfAdjointError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInternal;
  }
}
