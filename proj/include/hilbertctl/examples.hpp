#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hilbertctl/game.hpp"
#include "hilbertctl/hinf.hpp"
#include "hilbertctl/lq.hpp"
#include "hilbertctl/outputs.hpp"

namespace hilbertctl {

/// Gaussian smoothing of a signal on [-T, T].
struct Ex1Params {
  double half_width = 10.0;
  double spacing = 0.05;
  double sigma = 1.0;
};
inline constexpr double kEx1MinHalfWidth = 5.0;
inline constexpr double kEx1MaxSpacing = 0.25;

LQProblem example1_problem(const Ex1Params& p = {});

/// Heat conduction on [0, 1] in sine modes. `case_id` is 1, 2 or 3.
LQProblem example2_problem(int case_id, int modes = 64);
inline constexpr int kEx2MinModes = 8;

/// Shift/filling system with horizon 5. `odd` scales A, C, B1, D1 at odd
/// steps and `even` scales A, C at even steps.
struct Ex3Params {
  int n = 16;
  double odd = 0.70710678118654752;
  double even = 0.35355339059327376;
};
inline constexpr int kEx3MinDim = 8;

DisturbedSystem example3_system(const Ex3Params& p = {});

/// Closed-form min eigenvalue of pi3 at step k (0..5) for the default
/// factors.
double example3_rho_min(int k, double gamma);

/// Exact value of the perturbation norm for the default factors.
double example3_norm();

TwoInputSystem example4_system(int n = 64);
Eigen::VectorXd example4_x0(int n = 64);
inline constexpr int kEx4MinDim = 8;

struct Ex4ClosedForm {
  double upsilon1 = 0.0;
  double upsilon2 = 0.0;
  double omega1 = 0.0;
  double omega2 = 0.0;
};
Ex4ClosedForm example4_closed_form(double gamma, double rho);

/// Expected P1(0), P2(0), K1(0), K2(0) on an n-dimensional truncation.
struct Ex4Expected {
  Eigen::MatrixXd P1, P2, K1, K2;
};
Ex4Expected example4_expected(double gamma, double rho, int n);

/// kAtLeast passes when computed >= reference - tolerance.
enum class Check { kAbsolute, kRelative, kAtLeast };
std::string to_string(Check c);

struct Comparison {
  std::string name;
  double reference = 0.0;
  double computed = 0.0;
  double tolerance = 0.0;
  Check check = Check::kAbsolute;
  bool pass = false;
};

Comparison compare(std::string name, double reference, double computed,
                   double tolerance, Check check = Check::kAbsolute);

struct ExampleReport {
  std::string id;
  json parameters = json::object();
  json computed = json::object();
  std::vector<Comparison> comparisons;
  std::vector<CsvTable> tables;
  std::vector<std::string> notes;

  bool all_pass() const;
};

struct ExampleOptions {
  std::optional<int> dim;
  std::optional<double> gamma;
  std::optional<double> rho;
  double tol_gamma = 1e-7;
  std::uint64_t seed = 1;
  int workers = 1;
};

/// ids: ex1, ex2, ex2-case1, ex2-case2, ex2-case3, ex3, ex4.
/// Throws ParseError for an unknown id, ResolutionError when a truncation
/// is below the documented minimum.
ExampleReport run_example(const std::string& id,
                          const ExampleOptions& opts = {});

std::vector<std::string> example_ids();

json to_json(const ExampleReport& r);
RunResult to_run_result(const ExampleReport& r);

}  // namespace hilbertctl
