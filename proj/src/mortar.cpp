#include "bdm/mortar.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "bdm/quadrature.hpp"

namespace bdm {

// ----------------------------------------------------------- CompositionalMap

CompositionalMap::CompositionalMap(SideCurve slave, SideCurve master, double tol, int max_iter)
    : slave_(std::move(slave)), master_(std::move(master)), tol_(tol), max_iter_(max_iter) {
  const Vec2 s0 = eval_side(slave_, slave_.knots.front());
  const Vec2 s1 = eval_side(slave_, slave_.knots.back());
  const Vec2 m0 = eval_side(master_, master_.knots.front());
  const Vec2 m1 = eval_side(master_, master_.knots.back());
  scale_ = std::max(1.0, (s1 - s0).norm());
  const double eps = 1e-10 * scale_;
  if ((s0 - m0).norm() <= eps && (s1 - m1).norm() <= eps)
    reversed_ = false;
  else if ((s0 - m1).norm() <= eps && (s1 - m0).norm() <= eps)
    reversed_ = true;
  else
    throw Error(ErrorCode::NonCoincidentInterface, "interface end points do not coincide");
}

double CompositionalMap::solve(const SideCurve& target, const Vec2& x, double guess) const {
  const double a = target.knots.front(), b = target.knots.back();
  double eta = std::clamp(guess, a, b);
  for (int it = 0; it < max_iter_; ++it) {
    Vec2 t;
    const Vec2 r = eval_side(target, eta, &t) - x;
    const double step = r.dot(t) / t.squaredNorm();
    const double next = std::clamp(eta - step, a, b);
    const double moved = std::abs(next - eta);
    eta = next;
    if (moved <= tol_ * (b - a)) {
      if ((eval_side(target, eta) - x).norm() > 1e-10 * scale_)
        throw Error(ErrorCode::NonCoincidentInterface,
                    "interface point has no preimage on the opposite side");
      return eta;
    }
  }
  throw Error(ErrorCode::NonCoincidentInterface, "Newton iteration for phi did not converge");
}

double CompositionalMap::operator()(double xi) const {
  const Vec2 x = eval_side(slave_, xi);
  const double a = master_.knots.front(), b = master_.knots.back();
  const Vec2 m0 = eval_side(master_, a), m1 = eval_side(master_, b);
  const Vec2 chord = m1 - m0;
  const double s = std::clamp((x - m0).dot(chord) / chord.squaredNorm(), 0.0, 1.0);
  return solve(master_, x, a + s * (b - a));
}

double CompositionalMap::inverse(double eta) const {
  const Vec2 x = eval_side(master_, eta);
  const double a = slave_.knots.front(), b = slave_.knots.back();
  const Vec2 s0 = eval_side(slave_, a), s1 = eval_side(slave_, b);
  const Vec2 chord = s1 - s0;
  const double s = std::clamp((x - s0).dot(chord) / chord.squaredNorm(), 0.0, 1.0);
  return solve(slave_, x, a + s * (b - a));
}

bool CompositionalMap::is_affine() const {
  const double a = slave_.knots.front(), b = slave_.knots.back();
  const double fa = (*this)(a), fb = (*this)(b);
  for (int k = 1; k < 16; ++k) {
    const double xi = a + (b - a) * k / 16.0;
    const double lin = fa + (fb - fa) * k / 16.0;
    if (std::abs((*this)(xi) - lin) > 1e-10 * std::abs(fb - fa)) return false;
  }
  return true;
}

CompositionalMap build_phi(const InterfaceSpec& iface, const std::vector<Patch2D>& patches) {
  if (iface.master_patch < 0 || iface.master_patch >= static_cast<int>(patches.size()) ||
      iface.slave_patch < 0 || iface.slave_patch >= static_cast<int>(patches.size()) ||
      iface.master_patch == iface.slave_patch)
    throw Error(ErrorCode::InvalidArgument, "interface references invalid patches");
  CompositionalMap phi(side_curve(patches[iface.slave_patch], iface.slave_side),
                       side_curve(patches[iface.master_patch], iface.master_side));
  if (iface.reversed && *iface.reversed != phi.reversed())
    throw Error(ErrorCode::NonCoincidentInterface, "interface orientation flag contradicts geometry");
  return phi;
}

std::vector<double> project_master_knots(const CompositionalMap& phi, const KnotVector& slave_knots,
                                         double dedup_tol) {
  std::vector<double> all = slave_knots.breakpoints();
  const auto mb = phi.master().knots.breakpoints();
  for (size_t k = 1; k + 1 < mb.size(); ++k) all.push_back(phi.inverse(mb[k]));
  // slave breakpoints win over projected values within the tolerance
  std::vector<double> sb = slave_knots.breakpoints();
  std::sort(all.begin(), all.end());
  std::vector<double> out;
  for (double x : all) {
    auto it = std::lower_bound(sb.begin(), sb.end(), x - dedup_tol);
    if (it != sb.end() && std::abs(*it - x) <= dedup_tol) x = *it;
    if (out.empty() || x - out.back() > dedup_tol) out.push_back(x);
  }
  return out;
}

RefinedDualSpace refine_dual_space(const KnotVector& slave_knots, const Matrix& slave_homogeneous,
                                   const CompositionalMap& phi, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "dual refinement level must be >= 0");
  RefinedDualSpace r;
  r.level = n;
  r.knots = slave_knots;
  r.homogeneous = slave_homogeneous;
  if (n >= 1) {
    const auto merged = project_master_knots(phi, slave_knots);
    const auto existing = slave_knots.breakpoints();
    std::vector<double> add;
    for (double x : merged)
      if (!std::binary_search(existing.begin(), existing.end(), x)) add.push_back(x);
    std::tie(r.knots, r.homogeneous) = knot_refine(r.knots, r.homogeneous, add);
  }
  for (int level = 2; level <= n; ++level) {
    const auto b = r.knots.breakpoints();
    std::vector<double> mids;
    for (size_t i = 0; i + 1 < b.size(); ++i) mids.push_back(0.5 * (b[i] + b[i + 1]));
    std::tie(r.knots, r.homogeneous) = knot_refine(r.knots, r.homogeneous, mids);
  }
  const auto b = r.knots.breakpoints();
  for (size_t i = 0; i + 1 < b.size(); ++i) r.cells.emplace_back(b[i], b[i + 1]);
  return r;
}

CouplingMatrix assemble_coupling(const DualBasis& dual, const MasterTrace& master,
                                 const CompositionalMap& phi, int quad_order) {
  const int ps = dual.knots.degree(), pm = master.knots.degree();
  if (quad_order <= 0) quad_order = std::max(ps, pm) + 1;
  if (static_cast<int>(master.weights.size()) != master.knots.num_basis())
    throw Error(ErrorCode::DimensionMismatch, "master trace weights do not match its knots");
  CouplingMatrix out;
  out.G = Matrix::Zero(dual.num_functions(), master.knots.num_basis());
  out.matched = phi.is_affine();
  const auto segments = project_master_knots(phi, dual.knots);
  for (size_t s = 0; s + 1 < segments.size(); ++s) {
    const double a = segments[s], b = segments[s + 1];
    const int e = dual.element_of(0.5 * (a + b));
    const auto rule = gauss_legendre(quad_order, a, b);
    for (int q = 0; q < quad_order; ++q) {
      const double xi = rule.points[q];
      const auto nbar = dual.eval_on(e, xi);
      const double eta = phi(xi);
      const auto nm = bspline_eval(master.knots, eta);
      double W = 0.0;
      for (int j = 0; j < nm.values.size(); ++j) W += master.weights[nm.first + j] * nm.values[j];
      for (int i = 0; i < nbar.values.size(); ++i)
        for (int j = 0; j < nm.values.size(); ++j)
          out.G(nbar.first + i, nm.first + j) += rule.weights[q] * nbar.values[i] *
                                                 master.weights[nm.first + j] * nm.values[j] / W;
    }
  }
  return out;
}

// ------------------------------------------------------------------ constraint

namespace {

// quadrature roundoff on entries that vanish by biorthogonality
constexpr double kCouplingDropTol = 1e-13;

struct Rows {
  const Matrix* G;
  const std::vector<int>* slave;
  const std::vector<int>* master;
};

Constraint make_constraint(int num_full, const std::vector<Rows>& sets) {
  std::map<int, std::vector<std::pair<int, double>>> dependent;
  for (const auto& set : sets) {
    const Matrix& G = *set.G;
    if (G.rows() != static_cast<int>(set.slave->size()) || G.cols() != static_cast<int>(set.master->size()))
      throw Error(ErrorCode::DimensionMismatch, "coupling matrix does not match DOF lists");
    for (int i = 0; i < G.rows(); ++i) {
      const int s = (*set.slave)[i];
      if (s < 0 || s >= num_full) throw Error(ErrorCode::DimensionMismatch, "slave DOF out of range");
      if (dependent.count(s)) continue;
      std::vector<std::pair<int, double>> row;
      for (int j = 0; j < G.cols(); ++j)
        if (std::abs(G(i, j)) > kCouplingDropTol) row.emplace_back((*set.master)[j], G(i, j));
      dependent.emplace(s, std::move(row));
    }
  }

  Constraint c;
  c.num_full = num_full;
  c.reduced_of_full.assign(num_full, -1);
  for (int d = 0; d < num_full; ++d)
    if (!dependent.count(d)) {
      c.reduced_of_full[d] = static_cast<int>(c.full_of_reduced.size());
      c.full_of_reduced.push_back(d);
    }
  c.num_reduced = static_cast<int>(c.full_of_reduced.size());

  // resolve chains by substitution
  std::map<int, std::map<int, double>> resolved;
  std::map<int, int> state;  // 1 visiting, 2 done
  std::function<const std::map<int, double>&(int)> expand = [&](int d) -> const std::map<int, double>& {
    auto& st = state[d];
    if (st == 2) return resolved[d];
    if (st == 1) throw Error(ErrorCode::ChainedSlave, "cyclic master/slave dependency between interfaces");
    st = 1;
    std::map<int, double> out;
    for (auto [m, g] : dependent.at(d)) {
      if (c.reduced_of_full[m] >= 0) {
        out[c.reduced_of_full[m]] += g;
      } else {
        for (auto [r, h] : expand(m)) out[r] += g * h;
      }
    }
    resolved[d] = std::move(out);
    state[d] = 2;
    return resolved[d];
  };

  std::vector<Triplet> trip;
  for (int d = 0; d < num_full; ++d) {
    if (c.reduced_of_full[d] >= 0) {
      trip.emplace_back(d, c.reduced_of_full[d], 1.0);
    } else {
      for (auto [r, g] : expand(d)) trip.emplace_back(d, r, g);
    }
  }
  c.T.resize(num_full, c.num_reduced);
  c.T.setFromTriplets(trip.begin(), trip.end());
  return c;
}

}  // namespace

SparseMatrix Constraint::expanded(int ncomp) const {
  if (ncomp == 1) return T;
  std::vector<Triplet> trip;
  for (int k = 0; k < T.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(T, k); it; ++it)
      for (int c = 0; c < ncomp; ++c)
        trip.emplace_back(static_cast<int>(it.row()) * ncomp + c, static_cast<int>(it.col()) * ncomp + c,
                          it.value());
  SparseMatrix out(num_full * ncomp, num_reduced * ncomp);
  out.setFromTriplets(trip.begin(), trip.end());
  return out;
}

Constraint build_constraint(int num_full, const std::vector<InterfaceCoupling>& couplings) {
  std::vector<Rows> sets;
  for (const auto& c : couplings) sets.push_back({&c.coupling.G, &c.slave_dofs, &c.master_dofs});
  return make_constraint(num_full, sets);
}

Constraint build_constraint(int num_full, const CouplingMatrix& G, const std::vector<int>& slave_dofs,
                            const std::vector<int>& master_dofs) {
  return make_constraint(num_full, {{&G.G, &slave_dofs, &master_dofs}});
}

AssembledSystem condense(const AssembledSystem& system, const Constraint& constraint) {
  if (system.size() != constraint.num_full * system.ncomp || system.K.rows() != system.size())
    throw Error(ErrorCode::DimensionMismatch, "system size does not match the constraint");
  const SparseMatrix T = constraint.expanded(system.ncomp);
  AssembledSystem out;
  out.ncomp = system.ncomp;
  SparseMatrix KT = system.K * T;
  out.K = SparseMatrix(T.transpose()) * KT;
  out.f = T.transpose() * system.f;
  if (!system.roles.empty())
    for (int r : constraint.full_of_reduced) out.roles.push_back(system.roles[r]);
  return out;
}

AssembledSystem condense(const AssembledSystem& system, const CouplingMatrix& G,
                         const std::vector<int>& slave_dofs, const std::vector<int>& master_dofs) {
  const int nfull = system.size() / system.ncomp;
  return condense(system, build_constraint(nfull, G, slave_dofs, master_dofs));
}

// ------------------------------------------------------------------ mortar mesh

std::vector<DofRole> MortarMesh::roles() const {
  std::vector<DofRole> r(mesh.num_dofs, DofRole::MasterDistinct);
  std::vector<bool> slave_patch(spaces.size(), false);
  for (const auto& c : couplings) slave_patch[c.spec.slave_patch] = true;
  for (size_t p = 0; p < spaces.size(); ++p)
    if (slave_patch[p])
      for (int d = 0; d < spaces[p].num_dofs(); ++d) r[offsets[p] + d] = DofRole::SlaveDistinct;
  for (const auto& c : couplings)
    for (int d : c.master_dofs) r[d] = DofRole::MasterInterface;
  for (const auto& c : couplings)
    for (int d : c.slave_dofs) r[d] = DofRole::SlaveInterface;
  return r;
}

MortarMesh build_mortar_mesh(const MultiPatchModel& model, int dual_level, int quad_order,
                             bool subdivide_cells) {
  MortarMesh mm;
  mm.model = model;
  mm.dual_level = dual_level;
  for (const auto& p : model.patches) mm.spaces.emplace_back(p);

  std::vector<CompositionalMap> maps;
  std::vector<RefinedDualSpace> refined;
  for (const auto& iface : model.interfaces) {
    maps.push_back(build_phi(iface, model.patches));
    const auto curve = side_curve(model.patches[iface.slave_patch], iface.slave_side);
    refined.push_back(refine_dual_space(curve.knots, curve.homogeneous, maps.back(), dual_level));
    if (dual_level > 0)
      mm.spaces[iface.slave_patch].refine_side(iface.slave_side, refined.back().knots,
                                               refined.back().homogeneous);
  }
  mm.mesh = build_patch_mesh(mm.spaces, &mm.offsets);
  if (!subdivide_cells)
    for (auto& el : mm.mesh.elements)
      if (el.cell.lo != el.parent.lo || el.cell.hi != el.parent.hi) el.parent_quadrature = true;

  for (size_t k = 0; k < model.interfaces.size(); ++k) {
    const auto& iface = model.interfaces[k];
    InterfaceCoupling c;
    c.spec = iface;
    c.phi = maps[k];
    c.refined = refined[k];
    const auto st = mm.spaces[iface.slave_patch].trace(iface.slave_side);
    const auto mt = mm.spaces[iface.master_patch].trace(iface.master_side);
    c.dual = rational_dual(dual_extraction(st.knots), st.weights);
    c.coupling = assemble_coupling(c.dual, {mt.knots, mt.weights}, c.phi, quad_order);
    c.coupling.level = dual_level;
    for (int d : st.dofs) c.slave_dofs.push_back(mm.offsets[iface.slave_patch] + d);
    for (int d : mt.dofs) c.master_dofs.push_back(mm.offsets[iface.master_patch] + d);
    mm.couplings.push_back(std::move(c));
  }
  mm.constraint = build_constraint(mm.mesh.num_dofs, mm.couplings);
  return mm;
}

SaddleSystem assemble_saddle(const AssembledSystem& system, const MortarMesh& mesh) {
  const int nc = system.ncomp;
  const int nfull = mesh.mesh.num_dofs;
  if (system.size() != nfull * nc) throw Error(ErrorCode::DimensionMismatch, "system does not match mesh");
  int nmult = 0;
  for (const auto& c : mesh.couplings) nmult += static_cast<int>(c.slave_dofs.size());

  std::vector<Triplet> lm, ls;
  int base = 0;
  for (const auto& c : mesh.couplings) {
    const Matrix& G = c.coupling.G;
    for (int i = 0; i < G.rows(); ++i)
      for (int j = 0; j < G.cols(); ++j)
        if (G(i, j) != 0.0) lm.emplace_back(c.master_dofs[j], base + i, G(i, j));
    // K^{ls} by quadrature; equals the identity through biorthogonality
    const auto& kv = c.dual.knots;
    const auto& w = *c.dual.weights;
    const auto bp = kv.breakpoints();
    const int p = kv.degree();
    Matrix kls = Matrix::Zero(G.rows(), G.rows());
    for (size_t e = 0; e + 1 < bp.size(); ++e) {
      const auto rule = gauss_legendre(p + 2, bp[e], bp[e + 1]);
      for (size_t q = 0; q < rule.points.size(); ++q) {
        const auto nbar = c.dual.eval_on(static_cast<int>(e), rule.points[q]);
        const auto ns = bspline_eval(kv, rule.points[q]);
        double W = 0.0;
        for (int a = 0; a < ns.values.size(); ++a) W += w[ns.first + a] * ns.values[a];
        for (int a = 0; a < nbar.values.size(); ++a)
          for (int b = 0; b < ns.values.size(); ++b)
            kls(nbar.first + a, ns.first + b) +=
                rule.weights[q] * nbar.values[a] * w[ns.first + b] * ns.values[b] / W;
      }
    }
    for (int i = 0; i < kls.rows(); ++i)
      for (int j = 0; j < kls.cols(); ++j)
        if (kls(i, j) != 0.0) ls.emplace_back(c.slave_dofs[j], base + i, kls(i, j));
    base += static_cast<int>(G.rows());
  }

  SaddleSystem out;
  out.K_lm.resize(nfull, nmult);
  out.K_lm.setFromTriplets(lm.begin(), lm.end());
  out.K_ls.resize(nfull, nmult);
  out.K_ls.setFromTriplets(ls.begin(), ls.end());

  const int n = nfull * nc;
  out.num_primal = n;
  std::vector<Triplet> trip;
  for (int k = 0; k < system.K.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(system.K, k); it; ++it)
      trip.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  auto add_block = [&](const SparseMatrix& B, double sign) {
    for (int k = 0; k < B.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(B, k); it; ++it)
        for (int comp = 0; comp < nc; ++comp) {
          const int row = static_cast<int>(it.row()) * nc + comp;
          const int col = n + static_cast<int>(it.col()) * nc + comp;
          trip.emplace_back(row, col, sign * it.value());
          trip.emplace_back(col, row, sign * it.value());
        }
  };
  add_block(out.K_lm, 1.0);
  add_block(out.K_ls, -1.0);
  out.A.resize(n + nmult * nc, n + nmult * nc);
  out.A.setFromTriplets(trip.begin(), trip.end());
  out.rhs = Vector::Zero(n + nmult * nc);
  out.rhs.head(n) = system.f;
  return out;
}

}  // namespace bdm
