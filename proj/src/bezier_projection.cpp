#include "bdm/bezier_projection.hpp"

#include <algorithm>
#include <cmath>

namespace bdm {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

Matrix bernstein_gramian(const BernsteinInterval& interval) {
  const int p = interval.degree;
  Matrix g(p + 1, p + 1);
  for (int a = 0; a <= p; ++a)
    for (int b = 0; b <= p; ++b)
      g(a, b) = interval.length() * binomial(p, a) * binomial(p, b) /
                (binomial(2 * p, a + b) * (2 * p + 1));
  return g;
}

Matrix reconstruction_operator(const ExtractionOperator& C) {
  Eigen::FullPivLU<Matrix> lu(C.C);
  if (!lu.isInvertible())
    throw Error(ErrorCode::SingularMatrix, "element extraction operator is singular");
  return lu.inverse();
}

std::vector<Vector> projection_weights(const KnotVector& kv) {
  const auto ops = extract(kv);
  const int p = kv.degree();
  std::vector<double> total(kv.num_basis(), 0.0);
  std::vector<Vector> local(ops.size());
  for (size_t e = 0; e < ops.size(); ++e) {
    // every Bernstein polynomial integrates to h / (p + 1)
    const double bint = (ops[e].hi - ops[e].lo) / (p + 1);
    local[e] = ops[e].C.rowwise().sum() * bint;
    for (int a = 0; a <= p; ++a) total[ops[e].first + a] += local[e][a];
  }
  for (size_t e = 0; e < ops.size(); ++e)
    for (int a = 0; a <= p; ++a) local[e][a] /= total[ops[e].first + a];
  return local;
}

DualBasis dual_extraction(const KnotVector& kv) {
  const auto ops = extract(kv);
  const auto omega = projection_weights(kv);
  DualBasis dual;
  dual.knots = kv;
  dual.elements.resize(ops.size());
  for (size_t e = 0; e < ops.size(); ++e) {
    const BernsteinInterval in(ops[e].lo, ops[e].hi, kv.degree());
    const Matrix R = reconstruction_operator(ops[e]);
    const Matrix ginv = bernstein_gramian(in).ldlt().solve(
        Matrix::Identity(kv.degree() + 1, kv.degree() + 1));
    auto& d = dual.elements[e];
    d.element = static_cast<int>(e);
    d.first = ops[e].first;
    d.lo = ops[e].lo;
    d.hi = ops[e].hi;
    d.omega = omega[e];
    d.D = omega[e].asDiagonal() * R.transpose() * ginv;
  }
  return dual;
}

DualBasis rational_dual(const DualBasis& dual, std::vector<double> weights) {
  if (static_cast<int>(weights.size()) != dual.num_functions())
    throw Error(ErrorCode::DimensionMismatch, "one weight per primal function required");
  for (double w : weights)
    if (!(w > 0.0)) throw Error(ErrorCode::InvalidWeights, "weights must be positive");
  DualBasis out = dual;
  out.weights = std::move(weights);
  return out;
}

DualBasis physical_domain_dual(const DualBasis& dual, std::function<double(double)> jacobian) {
  DualBasis out = dual;
  out.jacobian = std::move(jacobian);
  return out;
}

int DualBasis::element_of(double xi) const {
  const int span = knots.find_span(xi);
  const auto spans = knots.element_spans();
  return static_cast<int>(std::lower_bound(spans.begin(), spans.end(), span) - spans.begin());
}

BasisValues DualBasis::eval(double xi) const { return eval_on(element_of(xi), xi); }

BasisValues DualBasis::eval_on(int e, double xi) const {
  const auto& d = elements.at(e);
  const int p = knots.degree();
  BasisValues out;
  out.first = d.first;
  out.values = d.D * bernstein_eval(BernsteinInterval(d.lo, d.hi, p), xi);
  if (weights) {
    // W(xi) / w_I turns biorthogonality against N_I into biorthogonality
    // against the rational functions w_I N_I / W.
    const auto b = bspline_eval(knots, xi);
    double W = 0.0;
    for (int a = 0; a < b.values.size(); ++a) W += (*weights)[b.first + a] * b.values[a];
    for (int a = 0; a <= p; ++a) out.values[a] *= W / (*weights)[d.first + a];
  }
  if (jacobian) {
    const double j = jacobian(xi);
    if (!(j > 0.0)) throw Error(ErrorCode::SingularMatrix, "degenerate boundary Jacobian");
    out.values /= j;
  }
  return out;
}

}  // namespace bdm
