#include "hilbertctl/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "hilbertctl/errors.hpp"

namespace hilbertctl {

namespace {

void check_family(const std::vector<OperatorExpr>& fam, int horizon,
                  const Space& dom, const Space& cod, const std::string& name) {
  if (static_cast<int>(fam.size()) != horizon + 1) {
    throw DimensionError(name + ": expected " + std::to_string(horizon + 1) +
                         " operators, got " + std::to_string(fam.size()));
  }
  for (std::size_t k = 0; k < fam.size(); ++k) {
    require_same_space(dom, fam[k].domain(), name + " domain");
    require_same_space(cod, fam[k].codomain(), name + " codomain");
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Evaluates body(i) for i in [0, n) on `workers` threads, each writing its own
// slot, so the result never depends on scheduling.
template <class Body>
void parallel_for(std::size_t n, int workers, const Body& body) {
  const std::size_t w = std::max<std::size_t>(
      1, std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)),
                               n));
  if (w == 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(w);
  for (std::size_t t = 0; t < w; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t; i < n; i += w) body(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

std::string to_string(NoiseKind k) {
  return k == NoiseKind::kRademacher ? "rademacher" : "gaussian";
}

NoiseKind noise_kind_from_string(const std::string& s) {
  if (s == "rademacher") return NoiseKind::kRademacher;
  if (s == "gaussian") return NoiseKind::kGaussian;
  throw ParseError("unknown noise kind '" + s + "'");
}

void LinearStochasticModel::validate() const {
  if (horizon < 0) throw DimensionError("horizon must be >= 0");
  check_family(A, horizon, H, H, "A");
  check_family(C, horizon, H, H, "C");
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& ch = inputs[i];
    const std::string tag = "input " + std::to_string(i);
    check_family(ch.B, horizon, ch.space, H, tag + " B");
    check_family(ch.D, horizon, ch.space, H, tag + " D");
    if (!ch.E.empty()) {
      if (!Z) throw DimensionError(tag + ": E given without an output space");
      check_family(ch.E, horizon, ch.space, *Z, tag + " E");
    }
  }
  if (Z) check_family(Cbar, horizon, H, *Z, "Cbar");
}

Trajectory simulate(const LinearStochasticModel& model, const Policy& policy,
                    const Eigen::VectorXd& x0, const Eigen::VectorXd& noise) {
  const int N = model.horizon;
  if (x0.size() != model.H.dim()) {
    throw DimensionError("simulate: x0 has " + std::to_string(x0.size()) +
                         " coordinates, expected " +
                         std::to_string(model.H.dim()));
  }
  if (noise.size() != N + 1) {
    throw DimensionError("simulate: noise path must have N+1 entries");
  }
  if (policy.channels.size() != model.inputs.size()) {
    throw DimensionError("simulate: policy has " +
                         std::to_string(policy.channels.size()) +
                         " channels, model has " +
                         std::to_string(model.inputs.size()));
  }
  const std::size_t m = model.inputs.size();
  Trajectory tr;
  tr.noise = noise;
  tr.x.reserve(N + 2);
  tr.x.push_back(x0);
  tr.u.assign(m, {});
  for (int k = 0; k <= N; ++k) {
    const Eigen::VectorXd& x = tr.x.back();
    Eigen::VectorXd drift = model.A[k].apply(x);
    Eigen::VectorXd diffusion = model.C[k].apply(x);
    Eigen::VectorXd z;
    if (model.Z) z = model.Cbar[k].apply(x);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& ch = model.inputs[i];
      const auto& pol = policy.channels[i];
      Eigen::VectorXd u = Eigen::VectorXd::Zero(ch.space.dim());
      if (!pol.gains.empty()) {
        const Eigen::MatrixXd& K = pol.gains.at(k);
        if (K.rows() != u.size() || K.cols() != x.size()) {
          throw DimensionError("simulate: gain shape mismatch on channel " +
                               std::to_string(i));
        }
        u += K * x;
      }
      if (!pol.offsets.empty()) {
        const Eigen::VectorXd& o = pol.offsets.at(k);
        if (o.size() != u.size()) {
          throw DimensionError("simulate: offset size mismatch on channel " +
                               std::to_string(i));
        }
        u += o;
      }
      if (pol.dither) {
        const Eigen::VectorXd d = pol.dither(k, noise.head(k), x);
        if (d.size() != u.size()) {
          throw DimensionError("simulate: dither size mismatch on channel " +
                               std::to_string(i));
        }
        u += d;
      }
      drift += ch.B[k].apply(u);
      diffusion += ch.D[k].apply(u);
      if (model.Z && !ch.E.empty()) z += ch.E[k].apply(u);
      tr.u[i].push_back(std::move(u));
    }
    if (model.Z) tr.z.push_back(std::move(z));
    tr.x.push_back(drift + noise(k) * diffusion);
  }
  return tr;
}

Eigen::VectorXd rademacher_path(std::uint64_t index, int horizon) {
  Eigen::VectorXd w(horizon + 1);
  for (int k = 0; k <= horizon; ++k) {
    w(k) = ((index >> k) & 1ULL) ? -1.0 : 1.0;
  }
  return w;
}

double enumerate_expectation(const LinearStochasticModel& model,
                             const Policy& policy, const Eigen::VectorXd& x0,
                             const Functional& f, int workers) {
  const int N = model.horizon;
  if (N > kMaxEnumerationHorizon) {
    throw EnumerationLimitError("exhaustive enumeration needs N <= " +
                                std::to_string(kMaxEnumerationHorizon) +
                                ", got N = " + std::to_string(N));
  }
  const std::size_t paths = std::size_t{1} << (N + 1);
  std::vector<double> values(paths);
  parallel_for(paths, workers, [&](std::size_t i) {
    values[i] = f(simulate(model, policy, x0, rademacher_path(i, N)));
  });
  return pairwise_sum(values) / static_cast<double>(paths);
}

Eigen::VectorXd noise_path(NoiseKind kind, std::uint64_t seed, std::uint64_t r,
                           int horizon) {
  std::mt19937_64 gen(splitmix64(splitmix64(seed) ^ splitmix64(~r)));
  Eigen::VectorXd w(horizon + 1);
  if (kind == NoiseKind::kRademacher) {
    for (int k = 0; k <= horizon; ++k) w(k) = (gen() >> 63) ? -1.0 : 1.0;
  } else {
    std::normal_distribution<double> g(0.0, 1.0);
    for (int k = 0; k <= horizon; ++k) w(k) = g(gen);
  }
  return w;
}

MonteCarloResult monte_carlo_expectation(const LinearStochasticModel& model,
                                         const Policy& policy,
                                         const Eigen::VectorXd& x0,
                                         const Functional& f, int replications,
                                         std::uint64_t seed, NoiseKind kind,
                                         int workers) {
  if (replications < 2) {
    throw DimensionError("monte_carlo_expectation needs >= 2 replications");
  }
  const std::size_t n = static_cast<std::size_t>(replications);
  std::vector<double> values(n);
  parallel_for(n, workers, [&](std::size_t r) {
    values[r] =
        f(simulate(model, policy, x0, noise_path(kind, seed, r, model.horizon)));
  });
  MonteCarloResult out;
  out.replications = replications;
  out.mean = pairwise_sum(values) / static_cast<double>(n);
  std::vector<double> dev(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double d = values[r] - out.mean;
    dev[r] = d * d;
  }
  const double var = pairwise_sum(dev) / static_cast<double>(n - 1);
  out.half_width = 1.96 * std::sqrt(var / static_cast<double>(n));
  return out;
}

double pairwise_sum(const double* v, std::size_t n) {
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

double sq_norm(const Space& space, const Eigen::VectorXd& v) {
  return inner(space, v, v);
}

}  // namespace hilbertctl
