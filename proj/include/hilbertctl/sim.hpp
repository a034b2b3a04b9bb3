#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hilbertctl/operator.hpp"

namespace hilbertctl {

/// One input channel u_i entering
///   x(k+1) = A x + sum_i B_i u_i + (C x + sum_i D_i u_i) w(k)
///   z(k)   = Cbar x + sum_i E_i u_i.
/// E may be left empty when the channel does not reach the output.
struct InputChannel {
  Space space = Space::ell2(1);
  std::vector<OperatorExpr> B, D, E;
};

/// Common forward model behind the controlled, disturbed, and two-input
/// systems.
struct LinearStochasticModel {
  int horizon = 0;
  Space H = Space::ell2(1);
  std::vector<OperatorExpr> A, C;
  std::vector<InputChannel> inputs;
  std::optional<Space> Z;
  std::vector<OperatorExpr> Cbar;  // empty when there is no output

  void validate() const;
  bool has_output() const { return Z.has_value(); }
};

/// Open-loop dither, evaluated with the noise seen so far (w(0..k-1)) and the
/// current state; this keeps every generated control adapted.
using Dither = std::function<Eigen::VectorXd(int k, const Eigen::VectorXd& past,
                                             const Eigen::VectorXd& x)>;

/// u(k) = K(k) x(k) + offset(k) + dither(k, ...). Empty vectors mean zero.
struct ChannelPolicy {
  std::vector<Eigen::MatrixXd> gains;
  std::vector<Eigen::VectorXd> offsets;
  Dither dither;
};

struct Policy {
  std::vector<ChannelPolicy> channels;
};

struct Trajectory {
  std::vector<Eigen::VectorXd> x;  // k = 0..N+1
  /// u[i][k]: channel i at step k.
  std::vector<std::vector<Eigen::VectorXd>> u;
  std::vector<Eigen::VectorXd> z;  // k = 0..N, empty without output
  Eigen::VectorXd noise;
};

using Functional = std::function<double(const Trajectory&)>;

enum class NoiseKind { kRademacher, kGaussian };
std::string to_string(NoiseKind k);
NoiseKind noise_kind_from_string(const std::string& s);

inline constexpr int kMaxEnumerationHorizon = 16;

/// Deterministic given the noise path.
Trajectory simulate(const LinearStochasticModel& model, const Policy& policy,
                    const Eigen::VectorXd& x0, const Eigen::VectorXd& noise);

/// Sign path number `index` (bit k set means w(k) = -1).
Eigen::VectorXd rademacher_path(std::uint64_t index, int horizon);

/// Exact E[f] under Rademacher noise by equal-weight enumeration of all
/// 2^(N+1) sign paths. Throws EnumerationLimitError for N > 16.
double enumerate_expectation(const LinearStochasticModel& model,
                             const Policy& policy, const Eigen::VectorXd& x0,
                             const Functional& f, int workers = 1);

struct MonteCarloResult {
  double mean = 0.0;
  double half_width = 0.0;  // 95 %
  int replications = 0;
};

/// Noise path for replication r, drawn from a stream keyed by (seed, r) only.
Eigen::VectorXd noise_path(NoiseKind kind, std::uint64_t seed, std::uint64_t r,
                           int horizon);

MonteCarloResult monte_carlo_expectation(const LinearStochasticModel& model,
                                         const Policy& policy,
                                         const Eigen::VectorXd& x0,
                                         const Functional& f, int replications,
                                         std::uint64_t seed,
                                         NoiseKind kind = NoiseKind::kGaussian,
                                         int workers = 1);

/// Deterministic pairwise (tree) summation.
double pairwise_sum(const double* v, std::size_t n);
double pairwise_sum(const std::vector<double>& v);

/// Weighted squared norm on `space`.
double sq_norm(const Space& space, const Eigen::VectorXd& v);

}  // namespace hilbertctl
