#include <doctest.h>

#include "bdm/benchmarks.hpp"
#include "bdm/weak_geometry.hpp"
#include "helpers.hpp"

using namespace bdm;

namespace {

Patch2D rect(double x0, double x1, double y0, double y1, int p, int eu, int ev) {
  const KnotVector ku = KnotVector::uniform(p, eu), kv = KnotVector::uniform(p, ev);
  std::vector<Vec2> pts;
  for (int j = 0; j < kv.num_basis(); ++j)
    for (int i = 0; i < ku.num_basis(); ++i) {
      // Greville abscissae give the identity map
      double gu = 0.0, gv = 0.0;
      for (int k = 1; k <= p; ++k) gu += ku.values()[i + k] / p, gv += kv.values()[j + k] / p;
      pts.emplace_back(x0 + (x1 - x0) * gu, y0 + (y1 - y0) * gv);
    }
  return Patch2D(ku, kv, pts, std::vector<double>(pts.size(), 1.0));
}

}  // namespace

TEST_CASE("compositional map on matched, scaled and reversed interfaces") {
  MultiPatchModel m;
  m.patches = {rect(0, 0.5, 0, 1, 2, 2, 2), rect(0.5, 1, 0, 1, 2, 3, 3)};
  const InterfaceSpec iface{0, Side::East, 1, Side::West, std::nullopt};
  const auto phi = build_phi(iface, m.patches);
  CHECK_FALSE(phi.reversed());
  CHECK(phi.is_affine());
  for (double x : {0.0, 0.2, 0.7, 1.0}) {
    CHECK(phi(x) == doctest::Approx(x).epsilon(1e-12));
    CHECK(phi.inverse(phi(x)) == doctest::Approx(x).epsilon(1e-12));
  }
  // slave above master, sides running opposite ways after a flip of the master
  MultiPatchModel r = m;
  auto& pts = r.patches[0].points();
  for (auto& x : pts) x = Vec2(x[0], 1.0 - x[1]);
  const auto phr = build_phi(iface, r.patches);
  CHECK(phr.reversed());
  CHECK(phr(0.25) == doctest::Approx(0.75));
  CHECK_THROWS_AS(build_phi({0, Side::East, 1, Side::West, false}, r.patches), Error);

  MultiPatchModel gap = m;
  for (auto& x : gap.patches[1].points()) x[0] += 0.01;
  try {
    build_phi(iface, gap.patches);
    FAIL("expected NonCoincidentInterface");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonCoincidentInterface);
  }
}

TEST_CASE("projected master knots and refined dual spaces") {
  MultiPatchModel m;
  m.patches = {rect(0, 0.5, 0, 1, 2, 2, 2), rect(0.5, 1, 0, 1, 2, 3, 3)};
  const auto phi = build_phi({0, Side::East, 1, Side::West, std::nullopt}, m.patches);
  const auto sc = side_curve(m.patches[1], Side::West);
  const auto merged = project_master_knots(phi, sc.knots);
  CHECK(merged.size() == 5);  // 0, 1/3, 1/2, 2/3, 1
  for (int n = 0; n <= 3; ++n) {
    const auto r = refine_dual_space(sc.knots, sc.homogeneous, phi, n);
    const int expect = n == 0 ? 3 : 4 << (n - 1);
    CHECK(r.knots.num_elements() == expect);
    // refinement does not move the boundary curve
    for (double x : {0.1, 0.45, 0.8}) CHECK(test::max_abs(curve_eval(r.knots, r.homogeneous, x) - curve_eval(sc.knots, sc.homogeneous, x)) < 1e-13);
  }
}

TEST_CASE("worked extraction example: G, M, R^{e,r}, and the weak operators") {
  const MortarMesh mm = build_mortar_mesh(gen_fig4(), 1);
  REQUIRE(mm.couplings.size() == 1);
  const Matrix& G = mm.couplings[0].coupling.G;
  Matrix Gx(6, 4);
  Gx << 1, 0, 0, 0, 1.0 / 3, 2.0 / 3, 0, 0, 0, 2.0 / 3, 1.0 / 3, 0, 0, 1.0 / 3, 2.0 / 3, 0, 0, 0, 2.0 / 3, 1.0 / 3,
      0, 0, 0, 1;
  REQUIRE(G.rows() == 6);
  REQUIRE(G.cols() == 4);
  CHECK(test::max_abs(G - Gx) <= 1e-14);

  const Matrix Ge = G.block(1, 0, 3, 3);
  const auto rops = extract(mm.couplings[0].refined.knots);
  REQUIRE(rops.size() == 4);
  const Matrix& Rer = rops[1].C;  // [1/3, 1/2]
  Matrix Rerx(3, 3);
  Rerx << 1.0 / 3, 0, 0, 2.0 / 3, 1, 0.5, 0, 0, 0.5;
  CHECK(test::max_abs(Rer - Rerx) <= 1e-14);

  const Matrix M = bernstein_transform({1.0 / 3, 2.0 / 3, 2}, {1.0 / 3, 0.5, 2});
  Matrix Mx(3, 3);
  Mx << 1, 0, 0, 0.5, 0.5, 0, 0.25, 0.5, 0.25;
  CHECK(test::max_abs(M - Mx) <= 1e-14);

  const Matrix Rt = refined_weak_interface_operator(Ge, Rer, M);
  Matrix Rtx(3, 3);
  Rtx << 1.0 / 9, -1.0 / 9, 1.0 / 9, 2.0 / 3, 2.0 / 3, 0, 2.0 / 9, 4.0 / 9, 8.0 / 9;
  CHECK(test::max_abs(Rt - Rtx) <= 1e-14);

  const auto slave = mm.model.patches[1];
  const Matrix Rx1 = extract(slave.knots(0))[1].C;
  const Matrix Rx2 = extract(slave.knots(1))[1].C;
  Matrix R1x(3, 3), R2x(3, 3);
  R1x << 0.5, 0, 0, 0.5, 1, 0.5, 0, 0, 0.5;
  R2x << 0.5, 0, 0, 0.5, 1, 0, 0, 0, 1;
  CHECK(test::max_abs(Rx1 - R1x) <= 1e-14);
  CHECK(test::max_abs(Rx2 - R2x) <= 1e-14);

  const Matrix full = tensor_weak_patch_operator(Rx2.topRows(2), Rx1, Rx2.bottomRows(1), Rt);
  Matrix Fx = Matrix::Zero(9, 9);
  Fx.block(0, 0, 3, 3) = 0.5 * R1x;
  Fx.block(3, 0, 3, 3) = 0.5 * R1x;
  Fx.block(3, 3, 3, 3) = R1x;
  Fx.block(6, 6, 3, 3) = Rtx;
  CHECK(test::max_abs(full - Fx) <= 1e-14);

  // the compiled weak mesh carries the same operator for the element
  const auto wm = build_weak_mesh(mm);
  bool found = false;
  for (const auto& el : wm.mesh.elements)
    if (el.patch == 1 && std::abs(el.cell.lo[0] - 1.0 / 3) < 1e-14 && std::abs(el.cell.hi[0] - 0.5) < 1e-14 &&
        el.cell.hi[1] == 1.0) {
      found = true;
      REQUIRE(el.op.rows() == 9);
      CHECK(test::max_abs(el.op - Fx) <= 1e-14);
    }
  CHECK(found);
}

TEST_CASE("coupling reproduces constants and the constraint is exact on the interface") {
  for (int n = 0; n <= 2; ++n) {
    const MortarMesh mm = build_mortar_mesh(gen_square_two_patch({2, 3}, false, 3, 1), n);
    const Matrix& G = mm.couplings[0].coupling.G;
    CHECK(test::max_abs(G.rowwise().sum() - Vector::Ones(G.rows())) < 1e-12);
    const auto& c = mm.constraint;
    CHECK(c.T.rows() == c.num_full);
    const Vector one = c.T * Vector::Ones(c.num_reduced);
    CHECK(test::max_abs(one - Vector::Ones(c.num_full)) < 1e-12);
  }
}

TEST_CASE("chained slaves resolve by substitution; cycles are rejected") {
  // three interfaces around a corner: a slave patch of one is master of another
  BenchmarkCase c;
  c.id = CaseId::PlateHole3;
  c.n = 0;
  CHECK_NOTHROW(setup_case(c, 0));

  MultiPatchModel m;
  m.patches = {rect(0, 0.5, 0, 1, 2, 2, 2), rect(0.5, 1, 0, 1, 2, 3, 3)};
  m.interfaces = {{0, Side::East, 1, Side::West, std::nullopt}, {1, Side::West, 0, Side::East, std::nullopt}};
  try {
    build_mortar_mesh(m, 0);
    FAIL("expected ChainedSlave");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ChainedSlave);
  }
}

TEST_CASE("saddle point multipliers: biorthogonality gives the identity slave block") {
  BenchmarkCase c;
  const auto setup = setup_case(c, 0);
  const auto full = assemble_case(setup, Method::Saddle);
  const auto sp = assemble_saddle(full, setup.mesh);
  const Matrix Ks(sp.K_ls);
  const Matrix Km(sp.K_lm);
  const auto& cp = setup.mesh.couplings[0];
  const Matrix& G = cp.coupling.G;
  const int ns = static_cast<int>(cp.slave_dofs.size()), nm = static_cast<int>(cp.master_dofs.size());
  Matrix s(ns, Ks.cols()), m(nm, Km.cols());
  for (int i = 0; i < ns; ++i) s.row(i) = Ks.row(cp.slave_dofs[i]);
  for (int j = 0; j < nm; ++j) m.row(j) = Km.row(cp.master_dofs[j]);
  CHECK(test::max_abs(s - Matrix::Identity(ns, ns)) < 1e-12);
  CHECK(test::max_abs(m - G.transpose()) < 1e-12);
}
