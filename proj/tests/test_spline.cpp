#include <doctest.h>

#include <random>

#include "bdm/quadrature.hpp"
#include "bdm/spline.hpp"
#include "helpers.hpp"

using namespace bdm;

TEST_CASE("knot vector validation") {
  CHECK_THROWS_AS(KnotVector({0, 0, 1, 1, 1}, 2), Error);
  CHECK_THROWS_AS(KnotVector({0, 0, 0, 0.6, 0.4, 1, 1, 1}, 2), Error);
  try {
    KnotVector({0, 0.5, 1}, 2);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidKnotVector);
  }
  const KnotVector kv({0, 0, 0, 0.5, 0.5, 1, 1, 1}, 2);
  CHECK(kv.num_basis() == 5);
  CHECK(kv.breakpoints() == std::vector<double>{0, 0.5, 1});
  CHECK(kv.find_span(1.0) == 4);
  CHECK(kv.multiplicity(0.5) == 2);
}

TEST_CASE("gauss rules integrate polynomials exactly") {
  for (int n = 1; n <= 8; ++n) {
    const auto r = gauss_legendre(n, -0.3, 1.7);
    for (int k = 0; k < 2 * n; ++k) {
      double s = 0.0;
      for (size_t i = 0; i < r.points.size(); ++i) s += r.weights[i] * std::pow(r.points[i], k);
      const double exact = (std::pow(1.7, k + 1) - std::pow(-0.3, k + 1)) / (k + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("b-spline basis: partition of unity and derivative by differences") {
  std::mt19937 rng(3);
  for (int p = 1; p <= 4; ++p) {
    const auto kv = test::random_knots(p, 5, rng);
    for (double x : {0.0, 0.13, 0.5, 0.77, 1.0}) {
      const auto b = bspline_eval(kv, x);
      CHECK(b.values.sum() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(b.values.minCoeff() >= 0.0);
    }
    const double x = 0.4321, h = 1e-6;
    int f0 = 0, fp = 0, fm = 0;
    const Matrix d = bspline_eval_ders(kv, x, 1, &f0);
    const Matrix vp = bspline_eval_ders(kv, x + h, 0, &fp);
    const Matrix vm = bspline_eval_ders(kv, x - h, 0, &fm);
    REQUIRE(f0 == fp);
    REQUIRE(f0 == fm);
    CHECK(test::max_abs(d.row(1) - (vp - vm) / (2 * h)) < 1e-6);
  }
}

TEST_CASE("knot insertion leaves the curve unchanged") {
  std::mt19937 rng(5);
  for (int p = 1; p <= 4; ++p) {
    const auto kv = test::random_knots(p, 4, rng);
    const Matrix cp = Matrix::Random(kv.num_basis(), 3);
    std::vector<double> xs{0.11, 0.5, 0.9};
    if (p > 1 && kv.multiplicity(0.5) == 0) xs.insert(xs.begin() + 1, 0.5);
    const auto [kr, cr] = knot_refine(kv, cp, xs);
    CHECK(kr.num_basis() == kv.num_basis() + static_cast<int>(xs.size()));
    for (double x : {0.0, 0.2, 0.45, 0.5, 0.66, 1.0})
      CHECK(test::max_abs(curve_eval(kv, cp, x) - curve_eval(kr, cr, x)) < 1e-13);
  }
}

TEST_CASE("bezier extraction reproduces the b-splines") {
  std::mt19937 rng(7);
  for (int p = 1; p <= 4; ++p) {
    const auto kv = test::random_knots(p, 6, rng);
    const auto ops = extract(kv);
    CHECK(static_cast<int>(ops.size()) == kv.num_elements());
    for (const auto& op : ops) {
      const double x = 0.3 * op.lo + 0.7 * op.hi;
      const Vector b = bernstein_eval({op.lo, op.hi, p}, x);
      const auto n = bspline_eval(kv, x);
      REQUIRE(n.first == op.first);
      CHECK(test::max_abs(op.C * b - n.values) < 1e-13);
    }
  }
}

TEST_CASE("bernstein transform between nested intervals") {
  const Matrix M = bernstein_transform({1.0 / 3, 2.0 / 3, 2}, {1.0 / 3, 0.5, 2});
  Matrix expect(3, 3);
  expect << 1, 0, 0, 0.5, 0.5, 0, 0.25, 0.5, 0.25;
  CHECK(test::max_abs(M - expect) < 1e-14);
  // the relation holds pointwise on the child interval
  for (int p = 1; p <= 4; ++p) {
    const BernsteinInterval parent(0.2, 0.9, p), child(0.35, 0.6, p);
    const Matrix T = bernstein_transform(parent, child);
    for (double x : {0.35, 0.4, 0.52, 0.6}) {
      const Vector bc = bernstein_eval(child, x);
      const Vector bp = bernstein_eval(parent, x);
      CHECK(test::max_abs(T.transpose() * bc - bp) < 1e-12);
    }
  }
  CHECK_THROWS_AS(bernstein_transform({0, 1, 2}, {0.5, 0.5, 2}), Error);
}

TEST_CASE("nurbs patch evaluation of a quarter circle") {
  const double s = std::sqrt(0.5);
  const KnotVector ku({0, 0, 0, 1, 1, 1}, 2), kv({0, 0, 1, 1}, 1);
  std::vector<Vec2> pts{{1, 0}, {1, 1}, {0, 1}, {2, 0}, {2, 2}, {0, 2}};
  std::vector<double> w{1, s, 1, 1, s, 1};
  const Patch2D patch(ku, kv, pts, w);
  CHECK(patch.is_rational());
  for (double u : {0.0, 0.3, 0.8})
    for (double v : {0.0, 0.5, 1.0}) CHECK(nurbs_eval(patch, u, v).x.norm() == doctest::Approx(1.0 + v));
  const Patch2D fine = patch.uniformly_refined(2);
  CHECK(test::max_abs(nurbs_eval(fine, 0.37, 0.61).x - nurbs_eval(patch, 0.37, 0.61).x) < 1e-13);
  CHECK_THROWS_AS(Patch2D(ku, kv, pts, {1, s, 1, 1, -s, 1}), Error);
}
