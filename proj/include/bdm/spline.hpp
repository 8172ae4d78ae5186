#pragma once

#include <array>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bdm/error.hpp"

namespace bdm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Open (clamped) knot vector of a univariate B-spline space.
class KnotVector {
 public:
  KnotVector() = default;
  KnotVector(std::vector<double> values, int degree);

  /// Open knot vector on [a, b] with `elements` equal spans.
  static KnotVector uniform(int degree, int elements, double a = 0.0, double b = 1.0);

  const std::vector<double>& values() const { return values_; }
  int degree() const { return degree_; }
  int num_basis() const { return static_cast<int>(values_.size()) - degree_ - 1; }
  double front() const { return values_[degree_]; }
  double back() const { return values_[values_.size() - degree_ - 1]; }

  /// Index s with values[s] <= xi < values[s+1]; the last nonempty span is
  /// closed on the right.
  int find_span(double xi) const;

  /// Distinct knot values, ascending.
  std::vector<double> breakpoints() const;
  int num_elements() const { return static_cast<int>(breakpoints().size()) - 1; }
  /// Span index (as in find_span) of every element, in order.
  std::vector<int> element_spans() const;

  int multiplicity(double xi, double tol = 0.0) const;
  bool contains(double xi) const { return xi >= front() && xi <= back(); }

  bool operator==(const KnotVector& other) const = default;

 private:
  std::vector<double> values_;
  int degree_ = 0;
};

struct BernsteinInterval {
  double lo = 0.0;
  double hi = 1.0;
  int degree = 1;

  BernsteinInterval() = default;
  BernsteinInterval(double lo_, double hi_, int degree_);
  double length() const { return hi - lo; }
};

/// Values of the p+1 Bernstein polynomials on the interval.
Vector bernstein_eval(const BernsteinInterval& interval, double xi);
/// Values (row 0) and first derivatives (row 1).
Matrix bernstein_eval_ders(const BernsteinInterval& interval, double xi);
/// Unchecked normalized evaluation on [0,1]; `out` receives p+1 values.
void bernstein_unit(int p, double t, std::span<double> out);

/// Matrix M relating the Bernstein bases of two intervals of equal degree,
/// B_target(xi) = M^{-T} B_source(xi) pointwise.
Matrix bernstein_transform(const BernsteinInterval& source, const BernsteinInterval& target);

struct BasisValues {
  int first = 0;  ///< global index of the first nonzero function
  Vector values;  ///< p+1 values
};

BasisValues bspline_eval(const KnotVector& kv, double xi);
/// Rows: derivative order 0..nder; columns: the p+1 active functions.
Matrix bspline_eval_ders(const KnotVector& kv, double xi, int nder, int* first = nullptr);

/// Insert one knot; coefficient rows are control values (any column count).
std::pair<KnotVector, Matrix> knot_insert(const KnotVector& kv, const Matrix& coeffs, double xi);
/// Insert a sorted list of knots one after another.
std::pair<KnotVector, Matrix> knot_refine(const KnotVector& kv, const Matrix& coeffs,
                                          std::span<const double> xis);

struct ExtractionOperator {
  int element = 0;
  int first = 0;  ///< global index of row 0
  double lo = 0.0, hi = 0.0;
  Matrix C;  ///< rows: local B-spline functions, columns: Bernstein polynomials
};

std::vector<ExtractionOperator> extract(const KnotVector& kv);

/// Evaluate a spline curve with the given control values.
Vector curve_eval(const KnotVector& kv, const Matrix& coeffs, double xi);

/// Tensor-product NURBS surface in R^2. Control point (i, j) is stored at
/// index i + n_u * j.
class Patch2D {
 public:
  Patch2D() = default;
  Patch2D(KnotVector ku, KnotVector kv, std::vector<Vec2> points, std::vector<double> weights);

  const KnotVector& knots(int dir) const { return dir == 0 ? ku_ : kv_; }
  int degree(int dir) const { return knots(dir).degree(); }
  int num_basis(int dir) const { return knots(dir).num_basis(); }
  int index(int i, int j) const { return i + num_basis(0) * j; }
  const std::vector<Vec2>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }
  std::vector<Vec2>& points() { return points_; }
  bool is_rational() const;

  /// Homogeneous control net as rows (w x, w y, w), index i + n_u j.
  Matrix homogeneous() const;
  static Patch2D from_homogeneous(KnotVector ku, KnotVector kv, const Matrix& hom);

  /// Insert knots in direction dir (0 = u, 1 = v).
  Patch2D refined(int dir, std::span<const double> xis) const;
  /// Bisect every span `times` times in both directions.
  Patch2D uniformly_refined(int times) const;

 private:
  KnotVector ku_, kv_;
  std::vector<Vec2> points_;
  std::vector<double> weights_;
};

struct NurbsPoint {
  Vec2 x;
  std::vector<int> indices;  ///< control point indices of active functions
  Vector values;             ///< rational basis values
  Matrix grads;              ///< 2 x nactive parametric gradients
  Mat2 jacobian;             ///< dx/dxi, columns are d/du and d/dv
};

NurbsPoint nurbs_eval(const Patch2D& patch, double u, double v);

}  // namespace bdm
