#include "hilbertctl/operator.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include "hilbertctl/errors.hpp"

namespace hilbertctl {

struct OperatorExpr::Node {
  Variant variant;
  Space domain;
  Space codomain;
  double scale = 0.0;
  double width = 0.0;
  double alpha = 0.0;
  double tau = 0.0;
  Eigen::MatrixXd dense;
  Eigen::VectorXd entries;
  std::vector<OperatorExpr> operands;

  mutable std::once_flag matrix_once;
  mutable Eigen::MatrixXd matrix;
  mutable std::once_flag norm_once;
  mutable double norm = 0.0;

  Node(Variant v, Space dom, Space cod)
      : variant(v), domain(std::move(dom)), codomain(std::move(cod)) {}
};

namespace {

using Variant = OperatorExpr::Variant;

void require_unit_weights(const Space& s, const char* who) {
  if (!s.unit_weights()) {
    throw DimensionError(std::string(who) +
                         " requires a space with unit weights, got " +
                         s.describe());
  }
}

const Eigen::MatrixXd& empty_matrix() {
  static const Eigen::MatrixXd m;
  return m;
}

const Eigen::VectorXd& empty_vector() {
  static const Eigen::VectorXd v;
  return v;
}

const std::vector<OperatorExpr>& empty_operands() {
  static const std::vector<OperatorExpr> v;
  return v;
}

}  // namespace

OperatorExpr::OperatorExpr(std::shared_ptr<const Node> node)
    : node_(std::move(node)) {}

OperatorExpr OperatorExpr::zero(const Space& domain, const Space& codomain) {
  return OperatorExpr(
      std::make_shared<const Node>(Variant::kZero, domain, codomain));
}

OperatorExpr OperatorExpr::identity(const Space& space) {
  return OperatorExpr(
      std::make_shared<const Node>(Variant::kIdentity, space, space));
}

OperatorExpr OperatorExpr::scaled(double c, const OperatorExpr& inner) {
  if (!std::isfinite(c)) throw DimensionError("scaled: factor must be finite");
  auto n = std::make_shared<Node>(Variant::kScaled, inner.domain(),
                                  inner.codomain());
  n->scale = c;
  n->operands = {inner};
  return OperatorExpr(std::move(n));
}

OperatorExpr OperatorExpr::dense(const Space& domain, const Space& codomain,
                                 Eigen::MatrixXd matrix) {
  if (matrix.rows() != codomain.dim() || matrix.cols() != domain.dim()) {
    throw DimensionError("dense: matrix is " + std::to_string(matrix.rows()) +
                         "x" + std::to_string(matrix.cols()) + ", expected " +
                         std::to_string(codomain.dim()) + "x" +
                         std::to_string(domain.dim()));
  }
  if (!matrix.allFinite()) throw DimensionError("dense: non-finite entries");
  auto n = std::make_shared<Node>(Variant::kDense, domain, codomain);
  n->dense = std::move(matrix);
  return OperatorExpr(std::move(n));
}

OperatorExpr OperatorExpr::diagonal(const Space& space,
                                    Eigen::VectorXd entries) {
  if (entries.size() != space.dim()) {
    throw DimensionError("diagonal: entry count does not match " +
                         space.describe());
  }
  auto n = std::make_shared<Node>(Variant::kDiagonal, space, space);
  n->entries = std::move(entries);
  return OperatorExpr(std::move(n));
}

OperatorExpr OperatorExpr::right_shift(const Space& domain,
                                       const Space& codomain) {
  require_unit_weights(domain, "right_shift");
  require_unit_weights(codomain, "right_shift");
  return OperatorExpr(
      std::make_shared<const Node>(Variant::kRightShift, domain, codomain));
}

OperatorExpr OperatorExpr::left_shift(const Space& domain,
                                      const Space& codomain) {
  require_unit_weights(domain, "left_shift");
  require_unit_weights(codomain, "left_shift");
  return OperatorExpr(
      std::make_shared<const Node>(Variant::kLeftShift, domain, codomain));
}

OperatorExpr OperatorExpr::filling(const Space& domain, const Space& codomain) {
  require_unit_weights(domain, "filling");
  require_unit_weights(codomain, "filling");
  if (domain.dim() > codomain.dim()) {
    throw DimensionError("filling: domain is larger than codomain");
  }
  return OperatorExpr(
      std::make_shared<const Node>(Variant::kFilling, domain, codomain));
}

OperatorExpr OperatorExpr::projection(const Space& domain,
                                      const Space& codomain) {
  require_unit_weights(domain, "projection");
  require_unit_weights(codomain, "projection");
  if (codomain.dim() > domain.dim()) {
    throw DimensionError("projection: codomain is larger than domain");
  }
  return OperatorExpr(
      std::make_shared<const Node>(Variant::kProjection, domain, codomain));
}

OperatorExpr OperatorExpr::gaussian_convolution(const Space& line,
                                                double width) {
  if (line.kind() != SpaceKind::kL2Line) {
    throw DimensionError("gaussian_convolution needs an L2_line space");
  }
  if (!(width > 0.0)) {
    throw DimensionError("gaussian_convolution: width must be > 0");
  }
  auto n = std::make_shared<Node>(Variant::kGaussianConvolution, line, line);
  n->width = width;
  return OperatorExpr(std::move(n));
}

OperatorExpr OperatorExpr::heat_semigroup(const Space& interval, double alpha,
                                          double tau) {
  if (interval.kind() != SpaceKind::kL2Interval) {
    throw DimensionError("heat_semigroup needs an L2_interval space");
  }
  if (!(alpha > 0.0) || !(tau >= 0.0)) {
    throw DimensionError("heat_semigroup: need alpha > 0 and tau >= 0");
  }
  auto n =
      std::make_shared<Node>(Variant::kHeatSemigroup, interval, interval);
  n->alpha = alpha;
  n->tau = tau;
  const double l = interval.length();
  n->entries.resize(interval.dim());
  for (int i = 0; i < interval.dim(); ++i) {
    const double k = (i + 1) * std::numbers::pi / l;
    n->entries(i) = std::exp(-k * k * alpha * tau);
  }
  return OperatorExpr(std::move(n));
}

OperatorExpr OperatorExpr::sum(std::vector<OperatorExpr> terms) {
  if (terms.empty()) throw DimensionError("sum: no terms");
  for (const auto& t : terms) {
    require_same_space(terms.front().domain(), t.domain(), "sum (domain)");
    require_same_space(terms.front().codomain(), t.codomain(),
                       "sum (codomain)");
  }
  if (terms.size() == 1) return terms.front();
  auto n = std::make_shared<Node>(Variant::kSum, terms.front().domain(),
                                  terms.front().codomain());
  n->operands = std::move(terms);
  return OperatorExpr(std::move(n));
}

OperatorExpr OperatorExpr::compose(std::vector<OperatorExpr> factors) {
  if (factors.empty()) throw DimensionError("compose: no factors");
  for (std::size_t i = 0; i + 1 < factors.size(); ++i) {
    require_same_space(factors[i].domain(), factors[i + 1].codomain(),
                       "compose");
  }
  if (factors.size() == 1) return factors.front();
  auto n = std::make_shared<Node>(Variant::kCompose, factors.back().domain(),
                                  factors.front().codomain());
  n->operands = std::move(factors);
  return OperatorExpr(std::move(n));
}

OperatorExpr OperatorExpr::adjoint_of(const OperatorExpr& inner) {
  auto n = std::make_shared<Node>(Variant::kAdjoint, inner.codomain(),
                                  inner.domain());
  n->operands = {inner};
  return OperatorExpr(std::move(n));
}

OperatorExpr::Variant OperatorExpr::variant() const { return node_->variant; }
const Space& OperatorExpr::domain() const { return node_->domain; }
const Space& OperatorExpr::codomain() const { return node_->codomain; }

double OperatorExpr::scale() const { return node_->scale; }
double OperatorExpr::width() const { return node_->width; }
double OperatorExpr::alpha() const { return node_->alpha; }
double OperatorExpr::tau() const { return node_->tau; }

const Eigen::MatrixXd& OperatorExpr::dense_matrix() const {
  return variant() == Variant::kDense ? node_->dense : empty_matrix();
}

const Eigen::VectorXd& OperatorExpr::diagonal_entries() const {
  if (variant() == Variant::kDiagonal) return node_->entries;
  return empty_vector();
}

const std::vector<OperatorExpr>& OperatorExpr::operands() const {
  return node_->operands.empty() ? empty_operands() : node_->operands;
}

std::string OperatorExpr::variant_name() const {
  switch (variant()) {
    case Variant::kZero:
      return "zero";
    case Variant::kIdentity:
      return "identity";
    case Variant::kScaled:
      return "scaled";
    case Variant::kDense:
      return "dense";
    case Variant::kDiagonal:
      return "diagonal";
    case Variant::kRightShift:
      return "right_shift";
    case Variant::kLeftShift:
      return "left_shift";
    case Variant::kFilling:
      return "filling";
    case Variant::kProjection:
      return "projection";
    case Variant::kGaussianConvolution:
      return "gaussian_convolution";
    case Variant::kHeatSemigroup:
      return "heat_semigroup";
    case Variant::kSum:
      return "sum";
    case Variant::kCompose:
      return "compose";
    case Variant::kAdjoint:
      return "adjoint";
  }
  return "unknown";
}

HVector OperatorExpr::apply(const HVector& x) const {
  require_same_space(domain(), x.space(), "apply (" + variant_name() + ")");
  return HVector(codomain(), apply(x.coords()));
}

Eigen::VectorXd OperatorExpr::apply(const Eigen::VectorXd& x) const {
  const int n = domain().dim();
  const int m = codomain().dim();
  if (x.size() != n) {
    throw DimensionError("apply (" + variant_name() + "): got " +
                         std::to_string(x.size()) + " coordinates, expected " +
                         std::to_string(n));
  }
  switch (variant()) {
    case Variant::kZero:
      return Eigen::VectorXd::Zero(m);
    case Variant::kIdentity:
      return x;
    case Variant::kScaled:
      return node_->scale * node_->operands[0].apply(x);
    case Variant::kDense:
      return node_->dense * x;
    case Variant::kDiagonal:
    case Variant::kHeatSemigroup:
      return node_->entries.cwiseProduct(x);
    case Variant::kRightShift: {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
      const int count = std::min(n, m - 1);
      if (count > 0) y.segment(1, count) = x.head(count);
      return y;
    }
    case Variant::kLeftShift: {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
      const int count = std::min(m, n - 1);
      if (count > 0) y.head(count) = x.segment(1, count);
      return y;
    }
    case Variant::kFilling: {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
      y.head(n) = x;
      return y;
    }
    case Variant::kProjection:
      return x.head(m);
    case Variant::kGaussianConvolution:
      return matrix() * x;
    case Variant::kSum: {
      Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
      for (const auto& t : node_->operands) y += t.apply(x);
      return y;
    }
    case Variant::kCompose: {
      Eigen::VectorXd y = x;
      for (auto it = node_->operands.rbegin(); it != node_->operands.rend();
           ++it) {
        y = it->apply(y);
      }
      return y;
    }
    case Variant::kAdjoint:
      return node_->operands[0].adjoint().apply(x);
  }
  throw Error("apply: unhandled variant");
}

OperatorExpr OperatorExpr::adjoint() const {
  switch (variant()) {
    case Variant::kZero:
      return zero(codomain(), domain());
    case Variant::kIdentity:
    case Variant::kDiagonal:
    case Variant::kGaussianConvolution:
    case Variant::kHeatSemigroup:
      return *this;
    case Variant::kScaled:
      return scaled(node_->scale, node_->operands[0].adjoint());
    case Variant::kDense:
      return dense(codomain(), domain(),
                   adjoint_matrix(node_->dense, domain(), codomain()));
    case Variant::kRightShift:
      return left_shift(codomain(), domain());
    case Variant::kLeftShift:
      return right_shift(codomain(), domain());
    case Variant::kFilling:
      return projection(codomain(), domain());
    case Variant::kProjection:
      return filling(codomain(), domain());
    case Variant::kSum: {
      std::vector<OperatorExpr> terms;
      terms.reserve(node_->operands.size());
      for (const auto& t : node_->operands) terms.push_back(t.adjoint());
      return sum(std::move(terms));
    }
    case Variant::kCompose: {
      std::vector<OperatorExpr> factors;
      factors.reserve(node_->operands.size());
      for (auto it = node_->operands.rbegin(); it != node_->operands.rend();
           ++it) {
        factors.push_back(it->adjoint());
      }
      return compose(std::move(factors));
    }
    case Variant::kAdjoint:
      return node_->operands[0];
  }
  throw Error("adjoint: unhandled variant");
}

const Eigen::MatrixXd& OperatorExpr::matrix() const {
  std::call_once(node_->matrix_once, [this] {
    const int n = domain().dim();
    const int m = codomain().dim();
    Eigen::MatrixXd out;
    switch (variant()) {
      case Variant::kZero:
        out = Eigen::MatrixXd::Zero(m, n);
        break;
      case Variant::kIdentity:
        out = Eigen::MatrixXd::Identity(n, n);
        break;
      case Variant::kScaled:
        out = node_->scale * node_->operands[0].matrix();
        break;
      case Variant::kDense:
        out = node_->dense;
        break;
      case Variant::kDiagonal:
      case Variant::kHeatSemigroup:
        out = node_->entries.asDiagonal();
        break;
      case Variant::kRightShift:
        out = Eigen::MatrixXd::Zero(m, n);
        for (int i = 0; i < std::min(n, m - 1); ++i) out(i + 1, i) = 1.0;
        break;
      case Variant::kLeftShift:
        out = Eigen::MatrixXd::Zero(m, n);
        for (int i = 0; i < std::min(m, n - 1); ++i) out(i, i + 1) = 1.0;
        break;
      case Variant::kFilling:
        out = Eigen::MatrixXd::Identity(m, n);
        break;
      case Variant::kProjection:
        out = Eigen::MatrixXd::Identity(m, n);
        break;
      case Variant::kGaussianConvolution: {
        const Eigen::VectorXd t = domain().grid();
        const Eigen::VectorXd& w = domain().weights();
        const double s = node_->width;
        const double c = 1.0 / (s * std::sqrt(2.0 * std::numbers::pi));
        out.resize(n, n);
        for (int j = 0; j < n; ++j) {
          for (int i = 0; i < n; ++i) {
            const double d = (t(i) - t(j)) / s;
            out(i, j) = c * std::exp(-0.5 * d * d) * w(j);
          }
        }
        break;
      }
      case Variant::kSum:
        out = Eigen::MatrixXd::Zero(m, n);
        for (const auto& t : node_->operands) out += t.matrix();
        break;
      case Variant::kCompose:
        out = node_->operands.front().matrix();
        for (std::size_t i = 1; i < node_->operands.size(); ++i) {
          out = out * node_->operands[i].matrix();
        }
        break;
      case Variant::kAdjoint: {
        const OperatorExpr& inner = node_->operands[0];
        out = adjoint_matrix(inner.matrix(), inner.domain(), inner.codomain());
        break;
      }
    }
    node_->matrix = std::move(out);
  });
  return node_->matrix;
}

double OperatorExpr::norm() const {
  std::call_once(node_->norm_once, [this] {
    const Eigen::MatrixXd& m = matrix();
    if (m.size() == 0) {
      node_->norm = 0.0;
      return;
    }
    const Eigen::VectorXd wc = codomain().weights().cwiseSqrt();
    const Eigen::VectorXd wd = domain().weights().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd g = wc.asDiagonal() * m * wd.asDiagonal();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(g);
    node_->norm = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  });
  return node_->norm;
}

Eigen::MatrixXd adjoint_matrix(const Eigen::MatrixXd& m, const Space& domain,
                               const Space& codomain) {
  if (domain.unit_weights() && codomain.unit_weights()) return m.transpose();
  return domain.weights().cwiseInverse().asDiagonal() * m.transpose() *
         codomain.weights().asDiagonal();
}

Eigen::MatrixXd adjoint_matrix(const OperatorExpr& op) {
  return adjoint_matrix(op.matrix(), op.domain(), op.codomain());
}

OperatorExpr operator+(const OperatorExpr& a, const OperatorExpr& b) {
  return OperatorExpr::sum({a, b});
}

OperatorExpr operator-(const OperatorExpr& a, const OperatorExpr& b) {
  return OperatorExpr::sum({a, OperatorExpr::scaled(-1.0, b)});
}

OperatorExpr operator*(const OperatorExpr& a, const OperatorExpr& b) {
  return OperatorExpr::compose({a, b});
}

OperatorExpr operator*(double c, const OperatorExpr& a) {
  return OperatorExpr::scaled(c, a);
}

}  // namespace hilbertctl
