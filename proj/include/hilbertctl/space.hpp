#pragma once

#include <memory>
#include <string>

#include <Eigen/Dense>

namespace hilbertctl {

enum class SpaceKind { kEll2, kL2Line, kL2Interval, kEuclidean };

std::string to_string(SpaceKind kind);
SpaceKind space_kind_from_string(const std::string& name);

/// Truncated coordinate description of a real separable Hilbert space.
///
/// Coordinates are taken against a fixed basis; the inner product is
/// <x, y> = sum_i w_i x_i y_i with strictly positive quadrature weights w.
/// Only the L2_line kind (point values on a grid) has non-unit weights: the
/// sine-mode coordinates of L2_interval are orthonormal already.
class Space {
 public:
  /// Coordinates of l^2 truncated to the first n entries.
  static Space ell2(int n);
  static Space euclidean(int n);
  /// Point values on the uniform grid {-T, -T+h, ..., T} with trapezoid
  /// weights. 2T/h must be an integer (to round-off).
  static Space l2_line(double half_width, double spacing);
  /// Coefficients against phi_n(x) = sqrt(2/l) sin(n pi x / l), n = 1..modes.
  static Space l2_interval(double length, int modes);

  SpaceKind kind() const { return data_->kind; }
  int dim() const { return data_->dim; }
  const Eigen::VectorXd& weights() const { return data_->weights; }
  bool unit_weights() const { return data_->unit_weights; }

  double half_width() const { return data_->half_width; }
  double spacing() const { return data_->spacing; }
  double length() const { return data_->length; }

  /// Grid nodes for L2_line; empty for the other kinds.
  Eigen::VectorXd grid() const;

  std::string describe() const;

  friend bool operator==(const Space& a, const Space& b);
  friend bool operator!=(const Space& a, const Space& b) { return !(a == b); }

 private:
  struct Data {
    SpaceKind kind;
    int dim;
    double half_width = 0.0;
    double spacing = 0.0;
    double length = 0.0;
    bool unit_weights = true;
    Eigen::VectorXd weights;
  };
  explicit Space(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  std::shared_ptr<const Data> data_;
};

/// An element of a truncated Hilbert space.
class HVector {
 public:
  HVector(Space space, Eigen::VectorXd coords);
  static HVector zero(const Space& space);

  const Space& space() const { return space_; }
  const Eigen::VectorXd& coords() const { return coords_; }
  int dim() const { return space_.dim(); }

  HVector& operator+=(const HVector& other);
  HVector& operator-=(const HVector& other);
  HVector& operator*=(double c);

 private:
  Space space_;
  Eigen::VectorXd coords_;
};

HVector operator+(HVector a, const HVector& b);
HVector operator-(HVector a, const HVector& b);
HVector operator*(double c, HVector a);

double inner(const HVector& x, const HVector& y);
double norm(const HVector& x);

/// Weighted inner product on raw coordinates of `space`.
double inner(const Space& space, const Eigen::VectorXd& x,
             const Eigen::VectorXd& y);

/// Throws DimensionError unless the two spaces agree.
void require_same_space(const Space& expected, const Space& actual,
                        const std::string& context);

}  // namespace hilbertctl
