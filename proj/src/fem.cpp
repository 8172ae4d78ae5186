#include "bdm/fem.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "bdm/detail/assembly.hpp"
#include "bdm/quadrature.hpp"

namespace bdm {

// --------------------------------------------------------------------- material

double MaterialModel::lambda() const {
  if (kind == Kind::LinearElastic && plane_stress) return E * nu / (1.0 - nu * nu);
  return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
}

double MaterialModel::mu() const { return E / (2.0 * (1.0 + nu)); }

void MaterialModel::validate() const {
  if (kind == Kind::Poisson) return;
  if (!(E > 0.0) || !(mu() > 0.0)) throw Error(ErrorCode::InvalidArgument, "material requires mu > 0");
  if (!(nu < 0.5) || !(nu > -1.0)) throw Error(ErrorCode::InvalidArgument, "Poisson ratio must lie in (-1, 0.5)");
}

MaterialModel MaterialModel::linear_elastic(double E, double nu, bool plane_stress) {
  MaterialModel m{Kind::LinearElastic, E, nu, plane_stress};
  m.validate();
  return m;
}

MaterialModel MaterialModel::neo_hookean(double E, double nu) {
  MaterialModel m{Kind::NeoHookean, E, nu, false};
  m.validate();
  return m;
}

// ------------------------------------------------------------------- quadrature

namespace {

std::vector<QuadPoint> cell_rule(const Element& el, int nu, int nv) {
  const auto ru = gauss_legendre(nu, el.cell.lo[0], el.cell.hi[0]);
  const auto rv = gauss_legendre(nv, el.cell.lo[1], el.cell.hi[1]);
  std::vector<QuadPoint> out;
  out.reserve(nu * nv);
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nu; ++i) out.push_back({ru.points[i], rv.points[j], ru.weights[i] * rv.weights[j]});
  return out;
}

bool in_cell(double x, double lo, double hi, double parent_hi) {
  return (x >= lo && x < hi) || (x == hi && hi == parent_hi);
}

}  // namespace

std::vector<QuadPoint> element_rule(const Element& el, int extra) {
  const int nu = el.degree[0] + 1 + extra, nv = el.degree[1] + 1 + extra;
  if (!el.parent_quadrature) return cell_rule(el, nu, nv);
  const auto ru = gauss_legendre(nu, el.parent.lo[0], el.parent.hi[0]);
  const auto rv = gauss_legendre(nv, el.parent.lo[1], el.parent.hi[1]);
  std::vector<QuadPoint> out;
  for (int j = 0; j < nv; ++j) {
    if (!in_cell(rv.points[j], el.cell.lo[1], el.cell.hi[1], el.parent.hi[1])) continue;
    for (int i = 0; i < nu; ++i)
      if (in_cell(ru.points[i], el.cell.lo[0], el.cell.hi[0], el.parent.hi[0]))
        out.push_back({ru.points[i], rv.points[j], ru.weights[i] * rv.weights[j]});
  }
  return out;
}

// -------------------------------------------------------------------- assembly

AssembledSystem assemble_poisson(const Mesh& mesh, const ScalarField& f, ExecutionPolicy policy) {
  return detail::assemble(mesh, 1, policy, [&](const Element& el) {
    const int n = static_cast<int>(el.dofs.size());
    detail::Local loc{Matrix::Zero(n, n), Vector::Zero(n)};
    for (const auto& q : element_rule(el)) {
      const auto pt = eval_element(el, q.u, q.v);
      const double w = q.w * std::abs(pt.detj);
      loc.K.noalias() += w * pt.dphys.transpose() * pt.dphys;
      if (f) loc.f += (w * f(pt.x)) * pt.values;
    }
    return loc;
  });
}

namespace {

Eigen::Matrix3d elasticity_matrix(const MaterialModel& m) {
  const double lam = m.lambda(), mu = m.mu();
  Eigen::Matrix3d D;
  D << lam + 2 * mu, lam, 0, lam, lam + 2 * mu, 0, 0, 0, mu;
  return D;
}

}  // namespace

AssembledSystem assemble_linear_elasticity(const Mesh& mesh, const MaterialModel& material,
                                           const VectorField& body, ExecutionPolicy policy) {
  material.validate();
  const Eigen::Matrix3d D = elasticity_matrix(material);
  return detail::assemble(mesh, 2, policy, [&](const Element& el) {
    const int n = static_cast<int>(el.dofs.size());
    detail::Local loc{Matrix::Zero(2 * n, 2 * n), Vector::Zero(2 * n)};
    Matrix B(3, 2 * n);
    for (const auto& q : element_rule(el)) {
      const auto pt = eval_element(el, q.u, q.v);
      const double w = q.w * std::abs(pt.detj);
      B.setZero();
      for (int a = 0; a < n; ++a) {
        B(0, 2 * a) = pt.dphys(0, a);
        B(1, 2 * a + 1) = pt.dphys(1, a);
        B(2, 2 * a) = pt.dphys(1, a);
        B(2, 2 * a + 1) = pt.dphys(0, a);
      }
      loc.K.noalias() += w * B.transpose() * D * B;
      if (body) {
        const Vec2 b = body(pt.x);
        for (int a = 0; a < n; ++a) {
          loc.f[2 * a] += w * pt.values[a] * b[0];
          loc.f[2 * a + 1] += w * pt.values[a] * b[1];
        }
      }
    }
    return loc;
  });
}

// ------------------------------------------------------------------ boundaries

Vector boundary_load_vector(const Mesh& mesh, int ncomp, const std::vector<BoundaryLoad>& loads) {
  Vector f = Vector::Zero(static_cast<Eigen::Index>(mesh.num_dofs) * ncomp);
  for (const auto& load : loads) {
    if (load.patch < 0 || load.patch >= static_cast<int>(mesh.patches.size()))
      throw Error(ErrorCode::InvalidArgument, "boundary load on unknown patch");
    const Patch2D& patch = mesh.patches[load.patch];
    const int d = side_direction(load.side);
    const double fixed = side_at_end(load.side) ? patch.knots(1 - d).back() : patch.knots(1 - d).front();
    for (const auto& el : mesh.elements) {
      if (el.patch != load.patch || !cell_on_side(el, patch, load.side)) continue;
      std::vector<double> cuts{el.cell.lo[d], el.cell.hi[d]};
      for (double b : load.breaks)
        if (b > cuts.front() && b < cuts.back()) cuts.push_back(b);
      std::sort(cuts.begin(), cuts.end());
      const int nq = el.degree[d] + 2;
      for (size_t s = 0; s + 1 < cuts.size(); ++s) {
        const auto rule = gauss_legendre(nq, cuts[s], cuts[s + 1]);
        for (int q = 0; q < nq; ++q) {
          const double u = d == 0 ? rule.points[q] : fixed;
          const double v = d == 0 ? fixed : rule.points[q];
          const auto pt = eval_element(el, u, v);
          const Vec2 t = pt.jacobian.col(d);
          Vec2 n(t[1], -t[0]);
          n.normalize();
          const double outward = n.dot(pt.jacobian.col(1 - d)) * (side_at_end(load.side) ? 1.0 : -1.0);
          if (outward < 0.0) n = -n;
          const Vector g = load.load(pt.x, n);
          if (g.size() != ncomp) throw Error(ErrorCode::DimensionMismatch, "boundary load has wrong size");
          const double w = rule.weights[q] * t.norm();
          for (int a = 0; a < pt.values.size(); ++a)
            for (int c = 0; c < ncomp; ++c) f[el.dofs[a] * ncomp + c] += w * pt.values[a] * g[c];
        }
      }
    }
  }
  return f;
}

void add_boundary_loads(AssembledSystem& system, const Mesh& mesh, const std::vector<BoundaryLoad>& loads) {
  system.f += boundary_load_vector(mesh, system.ncomp, loads);
}

void add_dirichlet_value(DirichletValues& values, int index, double value) {
  auto [it, fresh] = values.emplace(index, value);
  if (!fresh && std::abs(it->second - value) > 1e-10 * std::max(1.0, std::abs(value)))
    throw Error(ErrorCode::ConflictingConstraint,
                "conflicting Dirichlet values for DOF " + std::to_string(index));
}

DirichletValues project_dirichlet(const MortarMesh& mesh, const std::vector<DirichletCondition>& conds,
                                  int ncomp) {
  DirichletValues out;
  for (const auto& cond : conds) {
    if (cond.patch < 0 || cond.patch >= static_cast<int>(mesh.spaces.size()))
      throw Error(ErrorCode::InvalidArgument, "Dirichlet condition on unknown patch");
    if (cond.component >= ncomp) throw Error(ErrorCode::InvalidArgument, "Dirichlet component out of range");
    const auto tr = mesh.spaces[cond.patch].trace(cond.side);
    const SideCurve curve{tr.knots, tr.homogeneous, {}};
    const int n = tr.knots.num_basis();
    const int offset = mesh.offsets[cond.patch];
    const Vec2 x0 = eval_side(curve, tr.knots.front()), x1 = eval_side(curve, tr.knots.back());
    const auto bp = tr.knots.breakpoints();
    const int nq = tr.knots.degree() + 2;
    for (int comp = 0; comp < ncomp; ++comp) {
      if (cond.component >= 0 && comp != cond.component) continue;
      Vector c = Vector::Zero(n);
      c[0] = cond.value(x0, comp);
      c[n - 1] = cond.value(x1, comp);
      if (n > 2) {
        Matrix A = Matrix::Zero(n - 2, n - 2);
        Vector rhs = Vector::Zero(n - 2);
        for (size_t e = 0; e + 1 < bp.size(); ++e) {
          const auto rule = gauss_legendre(nq, bp[e], bp[e + 1]);
          for (int q = 0; q < nq; ++q) {
            const auto nb = bspline_eval(tr.knots, rule.points[q]);
            Vector r(nb.values.size());
            double W = 0.0;
            for (int a = 0; a < r.size(); ++a) W += tr.weights[nb.first + a] * nb.values[a];
            for (int a = 0; a < r.size(); ++a) r[a] = tr.weights[nb.first + a] * nb.values[a] / W;
            double g = cond.value(eval_side(curve, rule.points[q]), comp);
            for (int a = 0; a < r.size(); ++a) {
              const int I = nb.first + a;
              if (I == 0 || I == n - 1) g -= c[I] * r[a];
            }
            for (int a = 0; a < r.size(); ++a) {
              const int I = nb.first + a;
              if (I == 0 || I == n - 1) continue;
              rhs[I - 1] += rule.weights[q] * r[a] * g;
              for (int b = 0; b < r.size(); ++b) {
                const int J = nb.first + b;
                if (J == 0 || J == n - 1) continue;
                A(I - 1, J - 1) += rule.weights[q] * r[a] * r[b];
              }
            }
          }
        }
        c.segment(1, n - 2) = A.ldlt().solve(rhs);
      }
      for (int k = 0; k < n; ++k) add_dirichlet_value(out, (offset + tr.dofs[k]) * ncomp + comp, c[k]);
    }
  }
  return out;
}

int corner_dof(const MortarMesh& mesh, int patch, Side side, bool at_end) {
  const auto tr = mesh.spaces.at(patch).trace(side);
  return mesh.offsets[patch] + (at_end ? tr.dofs.back() : tr.dofs.front());
}

DirichletValues reduce_dirichlet(const DirichletValues& values, const Constraint& c, int ncomp) {
  DirichletValues out;
  for (auto [index, value] : values) {
    const int r = c.reduced_of_full.at(index / ncomp);
    if (r >= 0) add_dirichlet_value(out, r * ncomp + index % ncomp, value);
  }
  return out;
}

void apply_dirichlet(AssembledSystem& system, const DirichletValues& values) {
  const int n = system.size();
  Vector g = Vector::Zero(n);
  std::vector<char> fixed(n, 0);
  for (auto [index, value] : values) {
    if (index < 0 || index >= n) throw Error(ErrorCode::DimensionMismatch, "Dirichlet index out of range");
    g[index] = value;
    fixed[index] = 1;
  }
  system.f -= system.K * g;
  std::vector<Triplet> trip;
  trip.reserve(system.K.nonZeros());
  for (int k = 0; k < system.K.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(system.K, k); it; ++it)
      if (!fixed[it.row()] && !fixed[it.col()])
        trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  for (int i = 0; i < n; ++i)
    if (fixed[i]) {
      trip.emplace_back(i, i, 1.0);
      system.f[i] = g[i];
    }
  system.K.setFromTriplets(trip.begin(), trip.end());
}

// ---------------------------------------------------------------------- solves

Vector linear_solve(const SparseMatrix& A, const Vector& b, bool symmetric) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw Error(ErrorCode::DimensionMismatch, "linear system dimensions differ");
  Vector x;
  bool ok = false;
  if (symmetric) {
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(A);
    if (ldlt.info() == Eigen::Success) {
      x = ldlt.solve(b);
      ok = ldlt.info() == Eigen::Success;
    }
  }
  const double bn = b.norm();
  if (!ok || (A * x - b).norm() > 1e-10 * bn) {
    Eigen::SparseLU<SparseMatrix> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) throw Error(ErrorCode::SingularMatrix, "sparse factorization failed");
    x = lu.solve(b);
    if (lu.info() != Eigen::Success) throw Error(ErrorCode::SingularMatrix, "sparse solve failed");
  }
  if (!x.allFinite() || (A * x - b).norm() > 1e-10 * bn)
    throw Error(ErrorCode::SingularMatrix, "linear solve residual above tolerance");
  return x;
}

Vector linear_solve(const AssembledSystem& system) { return linear_solve(system.K, system.f, true); }

// ------------------------------------------------------------------- solutions

SolutionField::SolutionField(Mesh mesh, Vector coeffs, int ncomp)
    : mesh_(std::move(mesh)), coeffs_(std::move(coeffs)), ncomp_(ncomp) {
  if (coeffs_.size() != static_cast<Eigen::Index>(mesh_.num_dofs) * ncomp)
    throw Error(ErrorCode::DimensionMismatch, "coefficient vector does not match mesh");
  by_patch_.resize(mesh_.patches.size());
  for (size_t e = 0; e < mesh_.elements.size(); ++e)
    by_patch_[mesh_.elements[e].patch].push_back(static_cast<int>(e));
}

int SolutionField::find_element(int patch, double u, double v) const {
  constexpr double tol = 1e-12;
  for (int e : by_patch_.at(patch)) {
    const auto& c = mesh_.elements[e].cell;
    if (u >= c.lo[0] - tol && u <= c.hi[0] + tol && v >= c.lo[1] - tol && v <= c.hi[1] + tol) return e;
  }
  throw Error(ErrorCode::OutOfDomain, "parametric point outside patch");
}

Matrix SolutionField::local(int e) const {
  const auto& el = mesh_.elements[e];
  Matrix c(el.dofs.size(), ncomp_);
  for (size_t a = 0; a < el.dofs.size(); ++a)
    for (int k = 0; k < ncomp_; ++k) c(a, k) = coeffs_[el.dofs[a] * ncomp_ + k];
  return c;
}

Vector SolutionField::value(int patch, double u, double v) const {
  const int e = find_element(patch, u, v);
  const auto pt = eval_element(mesh_.elements[e], u, v);
  return local(e).transpose() * pt.values;
}

Matrix SolutionField::gradient(int patch, double u, double v) const {
  const int e = find_element(patch, u, v);
  const auto pt = eval_element(mesh_.elements[e], u, v);
  return local(e).transpose() * pt.dphys.transpose();
}

Vector SolutionField::value_at(const Vec2& x) const {
  const auto p = locate(mesh_.patches, x);
  return value(p.patch, p.u, p.v);
}

Vector expand_solution(const Constraint& c, const Vector& reduced, int ncomp) {
  return c.expanded(ncomp) * reduced;
}

namespace {

template <class F>
double integrate_cells(const SolutionField& s, F&& integrand) {
  double sum = 0.0;
  for (size_t e = 0; e < s.mesh().elements.size(); ++e) {
    const auto& el = s.mesh().elements[e];
    const Matrix c = s.local(static_cast<int>(e));
    for (const auto& q : cell_rule(el, el.degree[0] + 2, el.degree[1] + 2)) {
      const auto pt = eval_element(el, q.u, q.v);
      sum += q.w * std::abs(pt.detj) * integrand(pt, c);
    }
  }
  return sum;
}

}  // namespace

double l2_error(const SolutionField& s, const std::function<Vector(const Vec2&)>& exact) {
  return std::sqrt(integrate_cells(s, [&](const ElementPoint& pt, const Matrix& c) {
    const Vector uh = c.transpose() * pt.values;
    return (uh - exact(pt.x)).squaredNorm();
  }));
}

namespace {

Eigen::Vector3d stress_from(const Matrix& grad, const MaterialModel& m) {
  const Eigen::Vector3d eps(grad(0, 0), grad(1, 1), grad(0, 1) + grad(1, 0));
  return elasticity_matrix(m) * eps;
}

}  // namespace

double stress_l2_error(const SolutionField& s, const MaterialModel& m, int component, const ScalarField& exact) {
  if (s.ncomp() != 2) throw Error(ErrorCode::DimensionMismatch, "stress requires a displacement field");
  return std::sqrt(integrate_cells(s, [&](const ElementPoint& pt, const Matrix& c) {
    const Matrix grad = c.transpose() * pt.dphys.transpose();
    const double d = stress_from(grad, m)[component] - exact(pt.x);
    return d * d;
  }));
}

Eigen::Vector3d stress_at(const SolutionField& s, const MaterialModel& m, int patch, double u, double v) {
  return stress_from(s.gradient(patch, u, v), m);
}

double l2_difference(const SolutionField& a, const SolutionField& b) {
  if (a.mesh().patches.size() != b.mesh().patches.size() || a.ncomp() != b.ncomp())
    throw Error(ErrorCode::DimensionMismatch, "solution fields have different layouts");
  double sum = 0.0;
  for (size_t p = 0; p < a.mesh().patches.size(); ++p) {
    const Patch2D& pa = a.mesh().patches[p];
    const Patch2D& pb = b.mesh().patches[p];
    // affine maps x = X0 + (u - u0) / (u1 - u0) * (X1 - X0) per direction
    struct Map {
      double u0, u1, x0, x1;
      double to_param(double x) const { return u0 + (x - x0) / (x1 - x0) * (u1 - u0); }
      double to_phys(double u) const { return x0 + (u - u0) / (u1 - u0) * (x1 - x0); }
    };
    auto maps = [](const Patch2D& patch) {
      const auto k0 = patch.knots(0), k1 = patch.knots(1);
      const Vec2 lo = nurbs_eval(patch, k0.front(), k1.front()).x;
      const Vec2 hi = nurbs_eval(patch, k0.back(), k1.back()).x;
      return std::array<Map, 2>{Map{k0.front(), k0.back(), lo[0], hi[0]},
                                Map{k1.front(), k1.back(), lo[1], hi[1]}};
    };
    const auto ma = maps(pa), mb = maps(pb);
    int deg = 0;
    std::array<std::vector<double>, 2> cuts;
    for (int d = 0; d < 2; ++d) {
      deg = std::max({deg, pa.degree(d), pb.degree(d)});
      for (double u : pa.knots(d).breakpoints()) cuts[d].push_back(ma[d].to_phys(u));
      for (double u : pb.knots(d).breakpoints()) cuts[d].push_back(mb[d].to_phys(u));
      std::sort(cuts[d].begin(), cuts[d].end());
      std::vector<double> merged;
      for (double x : cuts[d])
        if (merged.empty() || x - merged.back() > 1e-12) merged.push_back(x);
      cuts[d] = merged;
    }
    const int nq = deg + 2;
    for (size_t j = 0; j + 1 < cuts[1].size(); ++j) {
      const auto ry = gauss_legendre(nq, cuts[1][j], cuts[1][j + 1]);
      for (size_t i = 0; i + 1 < cuts[0].size(); ++i) {
        const auto rx = gauss_legendre(nq, cuts[0][i], cuts[0][i + 1]);
        for (int qy = 0; qy < nq; ++qy)
          for (int qx = 0; qx < nq; ++qx) {
            const double x = rx.points[qx], y = ry.points[qy];
            const Vector va = a.value(static_cast<int>(p), ma[0].to_param(x), ma[1].to_param(y));
            const Vector vb = b.value(static_cast<int>(p), mb[0].to_param(x), mb[1].to_param(y));
            sum += rx.weights[qx] * ry.weights[qy] * (va - vb).squaredNorm();
          }
      }
    }
  }
  return std::sqrt(sum);
}

double interface_jump(const SolutionField& s, const MortarMesh& mesh) {
  double sum = 0.0;
  auto side_uv = [&](int patch, Side side, double t) {
    const Patch2D& p = mesh.mesh.patches[patch];
    const int d = side_direction(side);
    const double fixed = side_at_end(side) ? p.knots(1 - d).back() : p.knots(1 - d).front();
    return d == 0 ? std::pair{t, fixed} : std::pair{fixed, t};
  };
  for (const auto& c : mesh.couplings) {
    const auto segs = project_master_knots(c.phi, c.dual.knots);
    const int nq = std::max(c.dual.knots.degree(), c.phi.master().knots.degree()) + 2;
    for (size_t k = 0; k + 1 < segs.size(); ++k) {
      const auto rule = gauss_legendre(nq, segs[k], segs[k + 1]);
      for (int q = 0; q < nq; ++q) {
        const double xi = rule.points[q];
        Vec2 t;
        eval_side(c.phi.slave(), xi, &t);
        const auto [us, vs] = side_uv(c.spec.slave_patch, c.spec.slave_side, xi);
        const auto [um, vm] = side_uv(c.spec.master_patch, c.spec.master_side, c.phi(xi));
        const Vector jump = s.value(c.spec.slave_patch, us, vs) - s.value(c.spec.master_patch, um, vm);
        sum += rule.weights[q] * t.norm() * jump.squaredNorm();
      }
    }
  }
  return std::sqrt(sum);
}

}  // namespace bdm
