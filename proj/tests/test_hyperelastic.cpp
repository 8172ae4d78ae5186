#include <doctest.h>

#include <string>

#include "bdm/benchmarks.hpp"
#include "helpers.hpp"

using namespace bdm;

namespace {

double total_energy(const Mesh& mesh, const MaterialModel& m, const Vector& state) {
  double e = 0.0;
  for (const auto& el : mesh.elements) {
    const int na = static_cast<int>(el.dofs.size());
    Matrix u(2, na);
    for (int a = 0; a < na; ++a) u.col(a) = state.segment<2>(2 * el.dofs[a]);
    for (const auto& q : element_rule(el)) {
      const auto pt = eval_element(el, q.u, q.v);
      const Mat2 F = Mat2::Identity() + u * pt.dphys.transpose();
      e += q.w * std::abs(pt.detj) * neo_hookean_energy(m, F);
    }
  }
  return e;
}

struct Fixture {
  Mesh mesh = build_weak_mesh(gen_largedef(2, false, 2), 1).mesh;
  MaterialModel mat = MaterialModel::neo_hookean(1.0, 0.3);
  Vector state;
  Fixture() {
    state = Vector::Zero(2 * mesh.num_dofs);
    for (int i = 0; i < state.size(); ++i) state[i] = 0.02 * std::sin(1.3 * i + 0.4);
  }
};

}  // namespace

TEST_CASE("zero deformation is stress free") {
  const MaterialModel m = MaterialModel::neo_hookean(30e9, 0.48);
  CHECK(neo_hookean_energy(m, Mat2::Identity()) == doctest::Approx(0.0).scale(1.0));
  Fixture f;
  const Vector zero = Vector::Zero(f.state.size());
  const auto rt = neo_hookean_step(f.mesh, f.mat, 1.0, zero, zero);
  CHECK(rt.residual.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("internal force is the gradient of the stored energy") {
  Fixture f;
  const Vector zero = Vector::Zero(f.state.size());
  const auto rt = neo_hookean_step(f.mesh, f.mat, 1.0, f.state, zero);
  const double h = 1e-6;
  for (int i : {0, 7, 19, static_cast<int>(f.state.size()) - 1}) {
    Vector xp = f.state, xm = f.state;
    xp[i] += h;
    xm[i] -= h;
    const double d = (total_energy(f.mesh, f.mat, xp) - total_energy(f.mesh, f.mat, xm)) / (2 * h);
    CHECK(rt.residual[i] == doctest::Approx(d).epsilon(1e-6));
  }
}

TEST_CASE("consistent tangent matches finite differences of the residual") {
  Fixture f;
  const Vector zero = Vector::Zero(f.state.size());
  const auto rt = neo_hookean_step(f.mesh, f.mat, 1.0, f.state, zero);
  Vector dir(f.state.size());
  for (int i = 0; i < dir.size(); ++i) dir[i] = std::cos(0.7 * i);
  const double h = 1e-6;
  const Vector rp = neo_hookean_step(f.mesh, f.mat, 1.0, f.state + h * dir, zero).residual;
  const Vector rm = neo_hookean_step(f.mesh, f.mat, 1.0, f.state - h * dir, zero).residual;
  const Vector fd = (rp - rm) / (2 * h);
  const Vector an = rt.tangent * dir;
  CHECK((fd - an).norm() <= 1e-6 * an.norm());
  CHECK(SparseMatrix(rt.tangent - SparseMatrix(rt.tangent.transpose())).norm() <= 1e-12 * rt.tangent.norm());
}

TEST_CASE("inverted elements are reported") {
  Fixture f;
  const Vector zero = Vector::Zero(f.state.size());
  // a large push on one control point makes det F = 1 + c dN/dx negative somewhere
  Vector x = zero;
  x[2 * f.mesh.elements[0].dofs[4]] = 1e3;
  try {
    neo_hookean_step(f.mesh, f.mat, 1.0, x, zero);
    FAIL("expected ElementInversion");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ElementInversion);
  }
}

TEST_CASE("dead-load solution does not depend on the number of increments") {
  const auto a = solve_large_deformation(CaseId::LargeDef3, 2, false, 2, 20);
  const auto b = solve_large_deformation(CaseId::LargeDef3, 2, false, 2, 40);
  const Vector& ua = a.field.coeffs();
  CHECK((ua - b.field.coeffs()).norm() <= 1e-6 * ua.norm());
  CHECK(a.iterations.size() == 20);
  for (int it : a.iterations) CHECK(it <= 25);
}

TEST_CASE("load stepping failures carry the increment index") {
  try {
    solve_large_deformation(CaseId::LargeDef1, 2, false, 2, 20);
    FAIL("expected a failure at full load on this mesh");
  } catch (const Error& e) {
    CHECK((e.code() == ErrorCode::ElementInversion || e.code() == ErrorCode::NewtonDivergence));
    CHECK(std::string(e.what()).find("increment") != std::string::npos);
  }
  NonlinearProblem pb;
  CHECK_THROWS_AS(newton_load_stepping(pb, 0), Error);
}
