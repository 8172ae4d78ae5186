#include "bdm/spline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bdm {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfDomain: return "out_of_domain";
    case ErrorCode::InvalidKnotVector: return "invalid_knot_vector";
    case ErrorCode::InvalidWeights: return "invalid_weights";
    case ErrorCode::InvalidControlNet: return "invalid_control_net";
    case ErrorCode::DegenerateInterval: return "degenerate_interval";
    case ErrorCode::SingularMatrix: return "singular_matrix";
    case ErrorCode::NonCoincidentInterface: return "non_coincident_interface";
    case ErrorCode::ChainedSlave: return "chained_slave";
    case ErrorCode::DimensionMismatch: return "dimension_mismatch";
    case ErrorCode::ConflictingConstraint: return "conflicting_constraint";
    case ErrorCode::ElementInversion: return "element_inversion";
    case ErrorCode::NewtonDivergence: return "newton_divergence";
    case ErrorCode::InvalidArgument: return "invalid_argument";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

namespace {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

// ---------------------------------------------------------------- KnotVector

KnotVector::KnotVector(std::vector<double> values, int degree)
    : values_(std::move(values)), degree_(degree) {
  if (degree_ < 1) throw Error(ErrorCode::InvalidKnotVector, "degree must be >= 1");
  const int m = static_cast<int>(values_.size());
  if (m < 2 * (degree_ + 1))
    throw Error(ErrorCode::InvalidKnotVector, "knot vector too short for degree");
  for (int i = 0; i + 1 < m; ++i)
    if (!(values_[i] <= values_[i + 1]))
      throw Error(ErrorCode::InvalidKnotVector, "knot vector is not nondecreasing");
  for (int i = 1; i <= degree_; ++i) {
    if (values_[i] != values_[0] || values_[m - 1 - i] != values_[m - 1])
      throw Error(ErrorCode::InvalidKnotVector, "knot vector is not open");
  }
  if (!(values_[m - 1] > values_[0]))
    throw Error(ErrorCode::InvalidKnotVector, "knot vector has zero length");
  for (int i = degree_ + 1; i < m - degree_ - 1; ++i)
    if (multiplicity(values_[i]) > degree_)
      throw Error(ErrorCode::InvalidKnotVector, "interior knot multiplicity exceeds degree");
}

KnotVector KnotVector::uniform(int degree, int elements, double a, double b) {
  if (elements < 1) throw Error(ErrorCode::InvalidArgument, "need at least one element");
  std::vector<double> v(degree + 1, a);
  for (int e = 1; e < elements; ++e) v.push_back(a + (b - a) * e / elements);
  v.insert(v.end(), degree + 1, b);
  return {std::move(v), degree};
}

int KnotVector::find_span(double xi) const {
  if (xi < front() || xi > back()) {
    std::ostringstream os;
    os << "parameter " << xi << " outside [" << front() << ", " << back() << "]";
    throw Error(ErrorCode::OutOfDomain, os.str());
  }
  const int n = num_basis();
  if (xi >= values_[n]) {
    int s = n - 1;
    while (values_[s] == values_[s + 1]) --s;
    return s;
  }
  auto it = std::upper_bound(values_.begin(), values_.end(), xi);
  return static_cast<int>(it - values_.begin()) - 1;
}

std::vector<double> KnotVector::breakpoints() const {
  std::vector<double> b;
  for (double x : values_)
    if (b.empty() || x != b.back()) b.push_back(x);
  return b;
}

std::vector<int> KnotVector::element_spans() const {
  std::vector<int> s;
  for (int i = degree_; i < num_basis(); ++i)
    if (values_[i] < values_[i + 1]) s.push_back(i);
  return s;
}

int KnotVector::multiplicity(double xi, double tol) const {
  return static_cast<int>(std::count_if(values_.begin(), values_.end(),
                                        [&](double x) { return std::abs(x - xi) <= tol; }));
}

// ------------------------------------------------------------------ Bernstein

BernsteinInterval::BernsteinInterval(double lo_, double hi_, int degree_)
    : lo(lo_), hi(hi_), degree(degree_) {
  if (!(hi > lo)) throw Error(ErrorCode::DegenerateInterval, "Bernstein interval has hi <= lo");
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "negative degree");
}

void bernstein_unit(int p, double t, std::span<double> out) {
  // de Casteljau style triangle, numerically stable on [0, 1]
  out[0] = 1.0;
  const double s = 1.0 - t;
  for (int j = 1; j <= p; ++j) {
    double saved = 0.0;
    for (int k = 0; k < j; ++k) {
      const double tmp = out[k];
      out[k] = saved + s * tmp;
      saved = t * tmp;
    }
    out[j] = saved;
  }
}

namespace {

void check_inside(const BernsteinInterval& in, double xi) {
  const double tol = 1e-14 * std::max(1.0, std::abs(in.hi) + std::abs(in.lo));
  if (xi < in.lo - tol || xi > in.hi + tol) {
    std::ostringstream os;
    os << "parameter " << xi << " outside Bernstein interval [" << in.lo << ", " << in.hi << "]";
    throw Error(ErrorCode::OutOfDomain, os.str());
  }
}

}  // namespace

Vector bernstein_eval(const BernsteinInterval& interval, double xi) {
  check_inside(interval, xi);
  Vector b(interval.degree + 1);
  const double t = std::clamp((xi - interval.lo) / interval.length(), 0.0, 1.0);
  bernstein_unit(interval.degree, t, {b.data(), static_cast<size_t>(b.size())});
  return b;
}

Matrix bernstein_eval_ders(const BernsteinInterval& interval, double xi) {
  check_inside(interval, xi);
  const int p = interval.degree;
  const double t = std::clamp((xi - interval.lo) / interval.length(), 0.0, 1.0);
  Matrix out = Matrix::Zero(2, p + 1);
  std::vector<double> b(p + 1);
  bernstein_unit(p, t, b);
  for (int i = 0; i <= p; ++i) out(0, i) = b[i];
  if (p > 0) {
    std::vector<double> lower(p);
    bernstein_unit(p - 1, t, lower);
    const double scale = p / interval.length();
    for (int i = 0; i <= p; ++i) {
      const double left = i > 0 ? lower[i - 1] : 0.0;
      const double right = i < p ? lower[i] : 0.0;
      out(1, i) = scale * (left - right);
    }
  }
  return out;
}

Matrix bernstein_transform(const BernsteinInterval& source, const BernsteinInterval& target) {
  if (source.degree != target.degree)
    throw Error(ErrorCode::InvalidArgument, "Bernstein transform needs equal degrees");
  const int p = source.degree;
  const double t1 = (target.lo - source.lo) / source.length();
  const double t2 = (target.hi - source.lo) / source.length();
  // B_{l,d}(t), 1-based l, on the unit interval
  auto bern = [](int l, int d, double t) {
    if (l < 1 || l > d + 1) return 0.0;
    return binomial(d, l - 1) * std::pow(1.0 - t, d - l + 1) * std::pow(t, l - 1);
  };
  Matrix m = Matrix::Zero(p + 1, p + 1);
  for (int j = 1; j <= p + 1; ++j)
    for (int k = 1; k <= p + 1; ++k) {
      double sum = 0.0;
      for (int l = std::max(1, j + k - p - 1); l <= std::min(j, k); ++l)
        sum += bern(l, j - 1, t2) * bern(k - l + 1, p - j + 1, t1);
      m(j - 1, k - 1) = sum;
    }
  return m;
}

// ------------------------------------------------------------------ B-splines

Matrix bspline_eval_ders(const KnotVector& kv, double xi, int nder, int* first) {
  const int p = kv.degree();
  const int span = kv.find_span(xi);
  const auto& U = kv.values();
  // Piegl & Tiller A2.3
  Matrix ndu(p + 1, p + 1);
  std::vector<double> left(p + 1), right(p + 1);
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = xi - U[span + 1 - j];
    right[j] = U[span + j] - xi;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double temp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu(j, j) = saved;
  }
  const int n = std::min(nder, p);
  Matrix ders = Matrix::Zero(nder + 1, p + 1);
  for (int j = 0; j <= p; ++j) ders(0, j) = ndu(j, p);
  Matrix a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= n; ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      ders(k, r) = d;
      std::swap(s1, s2);
    }
  }
  double fac = p;
  for (int k = 1; k <= n; ++k) {
    ders.row(k) *= fac;
    fac *= (p - k);
  }
  if (first) *first = span - p;
  return ders;
}

BasisValues bspline_eval(const KnotVector& kv, double xi) {
  BasisValues out;
  Matrix d = bspline_eval_ders(kv, xi, 0, &out.first);
  out.values = d.row(0).transpose();
  return out;
}

std::pair<KnotVector, Matrix> knot_insert(const KnotVector& kv, const Matrix& coeffs, double xi) {
  const int p = kv.degree();
  const int n = kv.num_basis();
  if (coeffs.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "coefficient rows must equal number of basis functions");
  if (!(xi > kv.front() && xi < kv.back()))
    throw Error(ErrorCode::OutOfDomain, "inserted knot must lie strictly inside the domain");
  const auto& U = kv.values();
  const int k = kv.find_span(xi);
  if (kv.multiplicity(xi) >= p)
    throw Error(ErrorCode::InvalidKnotVector, "knot insertion would exceed multiplicity p");
  // Boehm's algorithm
  Matrix q(n + 1, coeffs.cols());
  for (int i = 0; i <= k - p; ++i) q.row(i) = coeffs.row(i);
  for (int i = k; i < n; ++i) q.row(i + 1) = coeffs.row(i);
  for (int i = k - p + 1; i <= k; ++i) {
    const double alpha = (xi - U[i]) / (U[i + p] - U[i]);
    q.row(i) = alpha * coeffs.row(i) + (1.0 - alpha) * coeffs.row(i - 1);
  }
  std::vector<double> v = U;
  v.insert(v.begin() + k + 1, xi);
  return {KnotVector(std::move(v), p), std::move(q)};
}

std::pair<KnotVector, Matrix> knot_refine(const KnotVector& kv, const Matrix& coeffs,
                                          std::span<const double> xis) {
  std::pair<KnotVector, Matrix> cur{kv, coeffs};
  for (double x : xis) cur = knot_insert(cur.first, cur.second, x);
  return cur;
}

std::vector<ExtractionOperator> extract(const KnotVector& kv) {
  const int p = kv.degree();
  const int n = kv.num_basis();
  // Raise every interior knot to multiplicity p; the rows of the refined
  // coefficient matrix are then the Bernstein coefficients of each original
  // function.
  std::vector<double> extra;
  const auto bps = kv.breakpoints();
  for (size_t b = 1; b + 1 < bps.size(); ++b)
    for (int m = kv.multiplicity(bps[b]); m < p; ++m) extra.push_back(bps[b]);
  auto [bez, coeffs] = knot_refine(kv, Matrix::Identity(n, n), extra);
  const auto spans = kv.element_spans();
  std::vector<ExtractionOperator> ops;
  ops.reserve(spans.size());
  for (size_t e = 0; e < spans.size(); ++e) {
    ExtractionOperator op;
    op.element = static_cast<int>(e);
    op.first = spans[e] - p;
    op.lo = bps[e];
    op.hi = bps[e + 1];
    op.C.resize(p + 1, p + 1);
    for (int a = 0; a <= p; ++a)
      for (int b = 0; b <= p; ++b) op.C(a, b) = coeffs(static_cast<int>(e) * p + b, op.first + a);
    ops.push_back(std::move(op));
  }
  return ops;
}

Vector curve_eval(const KnotVector& kv, const Matrix& coeffs, double xi) {
  auto b = bspline_eval(kv, xi);
  Vector x = Vector::Zero(coeffs.cols());
  for (int a = 0; a < b.values.size(); ++a) x += b.values[a] * coeffs.row(b.first + a).transpose();
  return x;
}

// -------------------------------------------------------------------- Patch2D

Patch2D::Patch2D(KnotVector ku, KnotVector kv, std::vector<Vec2> points, std::vector<double> weights)
    : ku_(std::move(ku)), kv_(std::move(kv)), points_(std::move(points)), weights_(std::move(weights)) {
  const size_t n = static_cast<size_t>(ku_.num_basis()) * kv_.num_basis();
  if (points_.size() != n)
    throw Error(ErrorCode::InvalidControlNet, "control net size does not match knot vectors");
  if (weights_.empty()) weights_.assign(n, 1.0);
  if (weights_.size() != n)
    throw Error(ErrorCode::InvalidControlNet, "weight count does not match control net");
  for (double w : weights_)
    if (!(w > 0.0)) throw Error(ErrorCode::InvalidWeights, "weights must be strictly positive");
}

bool Patch2D::is_rational() const {
  return std::any_of(weights_.begin(), weights_.end(), [&](double w) { return w != weights_[0]; });
}

Matrix Patch2D::homogeneous() const {
  Matrix h(points_.size(), 3);
  for (size_t i = 0; i < points_.size(); ++i)
    h.row(i) << weights_[i] * points_[i].x(), weights_[i] * points_[i].y(), weights_[i];
  return h;
}

Patch2D Patch2D::from_homogeneous(KnotVector ku, KnotVector kv, const Matrix& hom) {
  std::vector<Vec2> pts(hom.rows());
  std::vector<double> w(hom.rows());
  for (int i = 0; i < hom.rows(); ++i) {
    w[i] = hom(i, 2);
    pts[i] = Vec2(hom(i, 0), hom(i, 1)) / w[i];
  }
  return {std::move(ku), std::move(kv), std::move(pts), std::move(w)};
}

Patch2D Patch2D::refined(int dir, std::span<const double> xis) const {
  const int nu = num_basis(0), nv = num_basis(1);
  Matrix h = homogeneous();
  if (dir == 0) {
    // each row j is a curve in u; stack components column-wise
    Matrix rows(nu, 3 * nv);
    for (int j = 0; j < nv; ++j)
      for (int i = 0; i < nu; ++i) rows.block(i, 3 * j, 1, 3) = h.row(index(i, j));
    auto [k2, r2] = knot_refine(ku_, rows, xis);
    const int nu2 = k2.num_basis();
    Matrix out(nu2 * nv, 3);
    for (int j = 0; j < nv; ++j)
      for (int i = 0; i < nu2; ++i) out.row(i + nu2 * j) = r2.block(i, 3 * j, 1, 3);
    return from_homogeneous(k2, kv_, out);
  }
  Matrix cols(nv, 3 * nu);
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nu; ++i) cols.block(j, 3 * i, 1, 3) = h.row(index(i, j));
  auto [k2, c2] = knot_refine(kv_, cols, xis);
  const int nv2 = k2.num_basis();
  Matrix out(nu * nv2, 3);
  for (int j = 0; j < nv2; ++j)
    for (int i = 0; i < nu; ++i) out.row(i + nu * j) = c2.block(j, 3 * i, 1, 3);
  return from_homogeneous(ku_, k2, out);
}

Patch2D Patch2D::uniformly_refined(int times) const {
  Patch2D cur = *this;
  for (int t = 0; t < times; ++t) {
    for (int dir = 0; dir < 2; ++dir) {
      const auto b = cur.knots(dir).breakpoints();
      std::vector<double> mids;
      for (size_t i = 0; i + 1 < b.size(); ++i) mids.push_back(0.5 * (b[i] + b[i + 1]));
      cur = cur.refined(dir, mids);
    }
  }
  return cur;
}

NurbsPoint nurbs_eval(const Patch2D& patch, double u, double v) {
  int fu = 0, fv = 0;
  const Matrix du = bspline_eval_ders(patch.knots(0), u, 1, &fu);
  const Matrix dv = bspline_eval_ders(patch.knots(1), v, 1, &fv);
  const int pu = patch.degree(0), pv = patch.degree(1);
  const int na = (pu + 1) * (pv + 1);
  NurbsPoint out;
  out.indices.resize(na);
  Vector num(na);
  Matrix dnum(2, na);
  double W = 0.0;
  Vec2 dW = Vec2::Zero();
  for (int b = 0; b <= pv; ++b)
    for (int a = 0; a <= pu; ++a) {
      const int loc = a + (pu + 1) * b;
      const int idx = patch.index(fu + a, fv + b);
      const double w = patch.weights()[idx];
      out.indices[loc] = idx;
      num[loc] = w * du(0, a) * dv(0, b);
      dnum(0, loc) = w * du(1, a) * dv(0, b);
      dnum(1, loc) = w * du(0, a) * dv(1, b);
      W += num[loc];
      dW += dnum.col(loc);
    }
  if (!(W > 0.0)) throw Error(ErrorCode::InvalidWeights, "nonpositive NURBS weight function");
  out.values = num / W;
  out.grads.resize(2, na);
  for (int a = 0; a < na; ++a) out.grads.col(a) = (dnum.col(a) - out.values[a] * dW) / W;
  out.x.setZero();
  out.jacobian.setZero();
  for (int a = 0; a < na; ++a) {
    const Vec2& P = patch.points()[out.indices[a]];
    out.x += out.values[a] * P;
    out.jacobian += P * out.grads.col(a).transpose();
  }
  return out;
}

}  // namespace bdm
