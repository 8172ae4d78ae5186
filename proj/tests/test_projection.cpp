#include <doctest.h>

#include <random>

#include "bdm/bezier_projection.hpp"
#include "bdm/quadrature.hpp"
#include "helpers.hpp"

using namespace bdm;

namespace {

/// int dual_I * primal_J over the knot vector's elements.
Matrix dual_gram(const DualBasis& dual, const std::vector<double>* weights) {
  const KnotVector& kv = dual.knots;
  const int n = kv.num_basis(), p = kv.degree();
  Matrix G = Matrix::Zero(n, n);
  const auto bp = kv.breakpoints();
  for (size_t e = 0; e + 1 < bp.size(); ++e) {
    const auto rule = gauss_legendre(2 * p + 3, bp[e], bp[e + 1]);
    for (size_t q = 0; q < rule.points.size(); ++q) {
      const double x = rule.points[q];
      const auto d = dual.eval(x);
      auto s = bspline_eval(kv, x);
      if (weights) {
        double W = 0.0;
        for (int a = 0; a <= p; ++a) W += (*weights)[s.first + a] * s.values[a];
        for (int a = 0; a <= p; ++a) s.values[a] *= (*weights)[s.first + a] / W;
      }
      for (int a = 0; a < d.values.size(); ++a)
        for (int b = 0; b <= p; ++b) G(d.first + a, s.first + b) += rule.weights[q] * d.values[a] * s.values[b];
    }
  }
  return G;
}

}  // namespace

TEST_CASE("dual basis is biorthogonal for random knot vectors") {
  std::mt19937 rng(11);
  for (int p = 1; p <= 4; ++p)
    for (int k = 0; k < 10; ++k) {
      const auto kv = test::random_knots(p, 3 + k % 5, rng);
      const auto dual = dual_extraction(kv);
      const Matrix G = dual_gram(dual, nullptr);
      CHECK(test::max_abs(G - Matrix::Identity(G.rows(), G.cols())) < 1e-11);
    }
}

TEST_CASE("rational dual is biorthogonal to nurbs functions") {
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> wd(0.3, 3.0);
  for (int p = 1; p <= 4; ++p)
    for (int k = 0; k < 10; ++k) {
      const auto kv = test::random_knots(p, 2 + k % 6, rng);
      std::vector<double> w(kv.num_basis());
      for (double& x : w) x = wd(rng);
      const auto dual = rational_dual(dual_extraction(kv), w);
      const Matrix G = dual_gram(dual, &w);
      CHECK(test::max_abs(G - Matrix::Identity(G.rows(), G.cols())) < 1e-11);
    }
}

TEST_CASE("dual basis is local and reproduces its element support") {
  const KnotVector kv = KnotVector::uniform(3, 8);
  const auto dual = dual_extraction(kv);
  for (double x : {0.01, 0.3, 0.99}) {
    const auto d = dual.eval(x);
    const auto s = bspline_eval(kv, x);
    CHECK(d.first == s.first);
    CHECK(d.values.size() == 4);
  }
  // omega sums to one over the elements of each function's support
  const auto om = projection_weights(kv);
  Vector total = Vector::Zero(kv.num_basis());
  const auto ops = extract(kv);
  for (size_t e = 0; e < ops.size(); ++e) total.segment(ops[e].first, 4) += om[e];
  CHECK(test::max_abs(total - Vector::Ones(kv.num_basis())) < 1e-14);
}

TEST_CASE("reconstruction operator inverts the extraction operator") {
  std::mt19937 rng(17);
  const auto kv = test::random_knots(3, 5, rng);
  for (const auto& op : extract(kv)) {
    const Matrix R = reconstruction_operator(op);
    CHECK(test::max_abs(R * op.C - Matrix::Identity(4, 4)) < 1e-10);
  }
}

TEST_CASE("physical-measure dual is biorthogonal in arc length") {
  const KnotVector kv = KnotVector::uniform(2, 4);
  auto jac = [](double x) { return 1.0 + x * x; };
  const auto dual = physical_domain_dual(dual_extraction(kv), jac);
  Matrix G = Matrix::Zero(kv.num_basis(), kv.num_basis());
  for (int e = 0; e < 4; ++e) {
    const auto r = gauss_legendre(8, e * 0.25, (e + 1) * 0.25);
    for (size_t q = 0; q < r.points.size(); ++q) {
      const auto d = dual.eval(r.points[q]);
      const auto s = bspline_eval(kv, r.points[q]);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          G(d.first + a, s.first + b) += r.weights[q] * jac(r.points[q]) * d.values[a] * s.values[b];
    }
  }
  CHECK(test::max_abs(G - Matrix::Identity(G.rows(), G.cols())) < 1e-11);
}
