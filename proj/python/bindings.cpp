#include <optional>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hilbertctl/errors.hpp"
#include "hilbertctl/examples.hpp"
#include "hilbertctl/serialize.hpp"

namespace py = pybind11;
namespace hc = hilbertctl;
using hc::json;

namespace {

// Every entry point takes and returns JSON text; the Python layer converts.

hc::SystemDoc load(const std::string& text, hc::SystemType want) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw hc::ParseError(std::string("invalid JSON: ") + e.what());
  }
  hc::SystemDoc doc = hc::parse_system(j);
  if (doc.type != want) {
    throw hc::ParseError("document holds a " + to_string(doc.type) +
                         " system, expected " + to_string(want));
  }
  return doc;
}

Eigen::VectorXd require_x0(const hc::SystemDoc& doc) {
  if (!doc.x0) throw hc::ParseError("the system document has no 'x0'");
  return *doc.x0;
}

std::string lq_solve(const std::string& text) {
  const hc::SystemDoc doc = load(text, hc::SystemType::kControlled);
  if (!doc.cost) throw hc::ParseError("the system document has no 'cost'");
  hc::LQProblem prob{*doc.controlled, *doc.cost, require_x0(doc)};
  json r;
  r["solution"] = hc::to_json(hc::solve_lq(prob));
  r["theorem2"] = hc::to_json(hc::check_theorem2(prob.sys, prob.cost));
  return r.dump();
}

std::string brl_check(const std::string& text, double gamma) {
  const hc::SystemDoc doc = load(text, hc::SystemType::kDisturbed);
  return hc::to_json(hc::brl_check(*doc.disturbed, gamma)).dump();
}

std::string hinf_norm(const std::string& text, double tol_gamma) {
  const hc::SystemDoc doc = load(text, hc::SystemType::kDisturbed);
  hc::NormOptions o;
  o.tol_gamma = tol_gamma;
  return hc::to_json(hc::hinf_norm(*doc.disturbed, o)).dump();
}

std::string nash_solve(const std::string& text, double gamma, double rho,
                       bool verify, int workers) {
  const hc::SystemDoc doc = load(text, hc::SystemType::kTwoInput);
  const hc::GameParams p{gamma, rho};
  const Eigen::VectorXd x0 = require_x0(doc);
  const hc::CoupledSolution sol =
      hc::solve_coupled_riccati(*doc.two_input, p, x0);
  json r;
  r["solution"] = hc::to_json(sol);
  if (sol.solved()) {
    r["gain_residual"] = hc::coupled_gain_residual(*doc.two_input, p, sol);
    if (verify) {
      r["verification"] = hc::to_json(hc::verify_nash_equilibrium(
          *doc.two_input, p, sol, x0, 50, 1, workers));
    }
  }
  return r.dump();
}

std::string hinf_design(const std::string& text, double gamma) {
  const hc::SystemDoc doc = load(text, hc::SystemType::kTwoInput);
  const hc::HinfDesign d = hc::hinf_design(*doc.two_input, gamma);
  json r;
  r["design"] = hc::to_json(d);
  r["closed_loop_brl"] =
      hc::to_json(hc::brl_check(hc::closed_loop(*doc.two_input, d.Ku), gamma));
  return r.dump();
}

std::string h2hinf_design(const std::string& text, double gamma) {
  const hc::SystemDoc doc = load(text, hc::SystemType::kTwoInput);
  return hc::to_json(
             hc::h2hinf_design(*doc.two_input, gamma, require_x0(doc)))
      .dump();
}

std::string run_example(const std::string& id, std::optional<int> dim,
                        std::optional<double> gamma, std::optional<double> rho,
                        double tol_gamma, std::uint64_t seed, int workers) {
  hc::ExampleOptions o;
  o.dim = dim;
  o.gamma = gamma;
  o.rho = rho;
  o.tol_gamma = tol_gamma;
  o.seed = seed;
  o.workers = workers;
  return hc::to_json(hc::run_example(id, o)).dump();
}

}  // namespace

PYBIND11_MODULE(_hilbertctl, m) {
  m.doc() = "Native core of hilbertctl";

  auto base = py::register_exception<hc::Error>(m, "HilbertctlError",
                                                PyExc_RuntimeError);
  py::register_exception<hc::ParseError>(m, "ParseError", base.ptr());
  py::register_exception<hc::DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<hc::ResolutionError>(m, "ResolutionError", base.ptr());
  py::register_exception<hc::EnumerationLimitError>(m, "EnumerationLimitError",
                                                    base.ptr());
  auto step = py::register_exception<hc::StepError>(m, "StepError", base.ptr());
  py::register_exception<hc::AssumptionError>(m, "AssumptionError", step.ptr());
  py::register_exception<hc::DesignInfeasibleError>(m, "DesignInfeasibleError",
                                                    step.ptr());

  m.def("lq_solve", &lq_solve, py::arg("system"));
  m.def("brl_check", &brl_check, py::arg("system"), py::arg("gamma"));
  m.def("hinf_norm", &hinf_norm, py::arg("system"), py::arg("tol_gamma"));
  m.def("nash_solve", &nash_solve, py::arg("system"), py::arg("gamma"),
        py::arg("rho"), py::arg("verify"), py::arg("workers"));
  m.def("hinf_design", &hinf_design, py::arg("system"), py::arg("gamma"));
  m.def("h2hinf_design", &h2hinf_design, py::arg("system"), py::arg("gamma"));
  m.def("run_example", &run_example, py::arg("id"), py::arg("dim"),
        py::arg("gamma"), py::arg("rho"), py::arg("tol_gamma"),
        py::arg("seed"), py::arg("workers"));
  m.def("example_ids", &hc::example_ids);
  m.def("example3_norm", &hc::example3_norm);
  m.def("example4_closed_form", [](double gamma, double rho) {
    const hc::Ex4ClosedForm cf = hc::example4_closed_form(gamma, rho);
    return py::dict(py::arg("upsilon1") = cf.upsilon1,
                    py::arg("upsilon2") = cf.upsilon2,
                    py::arg("omega1") = cf.omega1,
                    py::arg("omega2") = cf.omega2);
  });
}
