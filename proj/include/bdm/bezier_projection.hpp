#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "bdm/spline.hpp"

namespace bdm {

/// Local dual operator of one element: dual functions are D * B.
struct DualExtractionOperator {
  int element = 0;
  int first = 0;  ///< global index of row 0
  double lo = 0.0, hi = 0.0;
  Matrix D;
  Vector omega;
};

/// Element-wise dual basis biorthogonal to a univariate spline space.
///
/// The basis is never assembled globally; evaluation composes D^e with the
/// Bernstein polynomials of the containing element. Optional rational and
/// physical-measure scalings are applied on evaluation.
struct DualBasis {
  KnotVector knots;
  std::vector<DualExtractionOperator> elements;
  /// Control weights of the primal space when it is rational.
  std::optional<std::vector<double>> weights;
  /// |dx/dxi| of the boundary map when duality is taken in arc length.
  std::function<double(double)> jacobian;

  int num_functions() const { return knots.num_basis(); }
  int element_of(double xi) const;
  /// Nonzero dual values at xi (p+1 of them, starting at `first`).
  BasisValues eval(double xi) const;
  /// Nonzero dual values using element e's operator (no span lookup).
  BasisValues eval_on(int e, double xi) const;
};

Matrix bernstein_gramian(const BernsteinInterval& interval);
Matrix reconstruction_operator(const ExtractionOperator& C);
/// omega^e_i = int_e N_i / int N_i, one vector per element.
std::vector<Vector> projection_weights(const KnotVector& kv);
DualBasis dual_extraction(const KnotVector& kv);
/// Duals biorthogonal to the NURBS functions w_I N_I / W with W = sum w_I N_I.
DualBasis rational_dual(const DualBasis& dual, std::vector<double> weights);
/// Duals biorthogonal in the arc-length measure |J| dxi.
DualBasis physical_domain_dual(const DualBasis& dual, std::function<double(double)> jacobian);

}  // namespace bdm
