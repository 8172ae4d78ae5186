#include <cmath>
#include <sstream>

#include "bdm/detail/assembly.hpp"
#include "bdm/fem.hpp"

namespace bdm {

double neo_hookean_energy(const MaterialModel& m, const Mat2& F) {
  const double J = F.determinant();
  if (!(J > 0.0)) throw Error(ErrorCode::ElementInversion, "deformation gradient with J <= 0");
  const double lam = m.lambda(), mu = m.mu();
  // plane strain: F_33 = 1 contributes 1 to tr b
  const double trb = (F * F.transpose()).trace() + 1.0;
  return lam * (0.25 * (J * J - 1.0) - 0.5 * std::log(J)) + 0.5 * mu * (trb - 3.0 - 2.0 * std::log(J));
}

ResidualTangent neo_hookean_step(const Mesh& mesh, const MaterialModel& material, double scale,
                                 const Vector& state, const Vector& f_ext, ExecutionPolicy policy) {
  const int n = mesh.num_dofs * 2;
  if (state.size() != n || f_ext.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "state or load does not match the mesh");
  const double lam = material.lambda(), mu = material.mu();
  auto sys = detail::assemble(mesh, 2, policy, [&](const Element& el) {
    const int na = static_cast<int>(el.dofs.size());
    detail::Local loc{Matrix::Zero(2 * na, 2 * na), Vector::Zero(2 * na)};
    Matrix u(2, na);
    for (int a = 0; a < na; ++a) u.col(a) = state.segment<2>(2 * el.dofs[a]);
    for (const auto& q : element_rule(el)) {
      const auto pt = eval_element(el, q.u, q.v);
      const double w = q.w * std::abs(pt.detj);
      const Matrix& dN = pt.dphys;  // 2 x na reference gradients
      const Mat2 F = Mat2::Identity() + u * dN.transpose();
      const double J = F.determinant();
      if (!(J > 0.0)) throw Error(ErrorCode::ElementInversion, "element inversion (J <= 0)");
      const Mat2 C = F.transpose() * F;
      const Mat2 Ci = C.inverse();
      const Mat2 S = mu * (Mat2::Identity() - Ci) + 0.5 * lam * (J * J - 1.0) * Ci;
      const Mat2 P = F * S;
      const double c1 = lam * J * J, c2 = 2.0 * mu - lam * (J * J - 1.0);
      auto CC = [&](int I, int Jj, int K, int L) {
        return c1 * Ci(I, Jj) * Ci(K, L) + 0.5 * c2 * (Ci(I, K) * Ci(Jj, L) + Ci(I, L) * Ci(Jj, K));
      };
      // A_iJkL = delta_ik S_JL + F_iI C_IJKL F_kK
      double A[2][2][2][2];
      for (int i = 0; i < 2; ++i)
        for (int J1 = 0; J1 < 2; ++J1)
          for (int k = 0; k < 2; ++k)
            for (int L = 0; L < 2; ++L) {
              double s = i == k ? S(J1, L) : 0.0;
              for (int I = 0; I < 2; ++I)
                for (int K = 0; K < 2; ++K) s += F(i, I) * CC(I, J1, K, L) * F(k, K);
              A[i][J1][k][L] = s;
            }
      for (int a = 0; a < na; ++a) {
        const Vec2 ga = dN.col(a);
        const Vec2 fa = P * ga;
        loc.f[2 * a] += w * fa[0];
        loc.f[2 * a + 1] += w * fa[1];
        for (int b = 0; b < na; ++b) {
          const Vec2 gb = dN.col(b);
          for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) {
              double s = 0.0;
              for (int J1 = 0; J1 < 2; ++J1)
                for (int L = 0; L < 2; ++L) s += ga[J1] * A[i][J1][k][L] * gb[L];
              loc.K(2 * a + i, 2 * b + k) += w * s;
            }
        }
      }
    }
    return loc;
  });
  return {sys.f - scale * f_ext, std::move(sys.K)};
}

LoadSteppingResult newton_load_stepping(const NonlinearProblem& pb, int increments, double tol_factor,
                                        int max_iter, ExecutionPolicy policy) {
  if (increments < 1 || tol_factor <= 1.0 || max_iter < 1)
    throw Error(ErrorCode::InvalidArgument, "invalid load stepping parameters");
  pb.material.validate();
  const SparseMatrix T = pb.constraint.expanded(2);
  const SparseMatrix Tt = T.transpose();
  const int nr = static_cast<int>(T.cols());
  std::vector<char> fixed(nr, 0);
  for (int d : pb.fixed) fixed.at(d) = 1;
  DirichletValues zero;
  for (int d : pb.fixed) zero[d] = 0.0;

  Vector x = Vector::Zero(nr);
  LoadSteppingResult out;
  for (int inc = 1; inc <= increments; ++inc) {
    const double scale = static_cast<double>(inc) / increments;
    double r0 = -1.0, rn = 0.0;
    int it = 0;
    for (;; ++it) {
      ResidualTangent rt;
      try {
        rt = neo_hookean_step(pb.mesh, pb.material, scale, T * x, pb.f_ext, policy);
      } catch (const Error& e) {
        std::ostringstream msg;
        msg << "increment " << inc << ": " << e.what();
        throw Error(e.code(), msg.str());
      }
      Vector r = Tt * rt.residual;
      for (int d = 0; d < nr; ++d)
        if (fixed[d]) r[d] = 0.0;
      rn = r.norm();
      if (r0 < 0.0) r0 = rn;
      if (rn == 0.0 || rn <= r0 / tol_factor) break;
      if (it == max_iter) {
        std::ostringstream msg;
        msg << "Newton did not converge in increment " << inc << " (residual " << rn << ", initial " << r0 << ")";
        throw Error(ErrorCode::NewtonDivergence, msg.str());
      }
      AssembledSystem sys;
      sys.ncomp = 2;
      sys.K = Tt * rt.tangent * T;
      sys.f = -r;
      apply_dirichlet(sys, zero);
      x += linear_solve(sys);
    }
    out.iterations.push_back(it);
  }
  out.state = T * x;
  return out;
}

}  // namespace bdm
