#include "hilbertctl/space.hpp"

#include <cmath>
#include <sstream>

#include "hilbertctl/errors.hpp"

namespace hilbertctl {

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::kEll2:
      return "ell2";
    case SpaceKind::kL2Line:
      return "L2_line";
    case SpaceKind::kL2Interval:
      return "L2_interval";
    case SpaceKind::kEuclidean:
      return "euclidean";
  }
  return "unknown";
}

SpaceKind space_kind_from_string(const std::string& name) {
  if (name == "ell2") return SpaceKind::kEll2;
  if (name == "L2_line") return SpaceKind::kL2Line;
  if (name == "L2_interval") return SpaceKind::kL2Interval;
  if (name == "euclidean") return SpaceKind::kEuclidean;
  throw ParseError("unknown space kind '" + name + "'");
}

namespace {

void require_positive_dim(int n, const char* who) {
  if (n < 1) {
    throw DimensionError(std::string(who) + ": dimension must be >= 1, got " +
                         std::to_string(n));
  }
}

}  // namespace

Space Space::ell2(int n) {
  require_positive_dim(n, "Space::ell2");
  Data d{SpaceKind::kEll2, n, 0.0, 0.0, 0.0, true, {}};
  d.weights = Eigen::VectorXd::Ones(n);
  return Space(std::make_shared<const Data>(std::move(d)));
}

Space Space::euclidean(int n) {
  require_positive_dim(n, "Space::euclidean");
  Data d{SpaceKind::kEuclidean, n, 0.0, 0.0, 0.0, true, {}};
  d.weights = Eigen::VectorXd::Ones(n);
  return Space(std::make_shared<const Data>(std::move(d)));
}

Space Space::l2_line(double half_width, double spacing) {
  if (!(half_width > 0.0) || !(spacing > 0.0)) {
    throw DimensionError("Space::l2_line: half width and spacing must be > 0");
  }
  const double cells = 2.0 * half_width / spacing;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
    throw DimensionError("Space::l2_line: 2T/h must be an integer");
  }
  const int n = static_cast<int>(rounded) + 1;
  require_positive_dim(n - 1, "Space::l2_line");
  Data d{SpaceKind::kL2Line, n, 0.0, 0.0, 0.0, true, {}};
  d.half_width = half_width;
  d.spacing = spacing;
  d.unit_weights = false;
  d.weights = Eigen::VectorXd::Constant(n, spacing);
  d.weights(0) = 0.5 * spacing;
  d.weights(n - 1) = 0.5 * spacing;
  return Space(std::make_shared<const Data>(std::move(d)));
}

Space Space::l2_interval(double length, int modes) {
  require_positive_dim(modes, "Space::l2_interval");
  if (!(length > 0.0)) {
    throw DimensionError("Space::l2_interval: length must be > 0");
  }
  Data d{SpaceKind::kL2Interval, modes, 0.0, 0.0, 0.0, true, {}};
  d.length = length;
  d.weights = Eigen::VectorXd::Ones(modes);
  return Space(std::make_shared<const Data>(std::move(d)));
}

Eigen::VectorXd Space::grid() const {
  if (kind() != SpaceKind::kL2Line) return {};
  Eigen::VectorXd t(dim());
  for (int i = 0; i < dim(); ++i) t(i) = -half_width() + i * spacing();
  return t;
}

std::string Space::describe() const {
  std::ostringstream os;
  os << to_string(kind()) << "(dim=" << dim();
  if (kind() == SpaceKind::kL2Line) {
    os << ", T=" << half_width() << ", h=" << spacing();
  } else if (kind() == SpaceKind::kL2Interval) {
    os << ", l=" << length();
  }
  os << ")";
  return os.str();
}

bool operator==(const Space& a, const Space& b) {
  if (a.data_ == b.data_) return true;
  return a.kind() == b.kind() && a.dim() == b.dim() &&
         a.half_width() == b.half_width() && a.spacing() == b.spacing() &&
         a.length() == b.length();
}

HVector::HVector(Space space, Eigen::VectorXd coords)
    : space_(std::move(space)), coords_(std::move(coords)) {
  if (coords_.size() != space_.dim()) {
    throw DimensionError("HVector: " + std::to_string(coords_.size()) +
                         " coordinates for " + space_.describe());
  }
  if (!coords_.allFinite()) {
    throw DimensionError("HVector: coordinates must be finite");
  }
}

HVector HVector::zero(const Space& space) {
  return HVector(space, Eigen::VectorXd::Zero(space.dim()));
}

HVector& HVector::operator+=(const HVector& other) {
  require_same_space(space_, other.space_, "HVector::operator+=");
  coords_ += other.coords_;
  return *this;
}

HVector& HVector::operator-=(const HVector& other) {
  require_same_space(space_, other.space_, "HVector::operator-=");
  coords_ -= other.coords_;
  return *this;
}

HVector& HVector::operator*=(double c) {
  coords_ *= c;
  return *this;
}

HVector operator+(HVector a, const HVector& b) { return a += b; }
HVector operator-(HVector a, const HVector& b) { return a -= b; }
HVector operator*(double c, HVector a) { return a *= c; }

double inner(const Space& space, const Eigen::VectorXd& x,
             const Eigen::VectorXd& y) {
  if (x.size() != space.dim() || y.size() != space.dim()) {
    throw DimensionError("inner: coordinate length does not match " +
                         space.describe());
  }
  if (space.unit_weights()) return x.dot(y);
  return (x.array() * space.weights().array() * y.array()).sum();
}

double inner(const HVector& x, const HVector& y) {
  require_same_space(x.space(), y.space(), "inner");
  return inner(x.space(), x.coords(), y.coords());
}

double norm(const HVector& x) { return std::sqrt(inner(x, x)); }

void require_same_space(const Space& expected, const Space& actual,
                        const std::string& context) {
  if (expected != actual) {
    throw DimensionError(context + ": expected " + expected.describe() +
                         ", got " + actual.describe());
  }
}

}  // namespace hilbertctl
