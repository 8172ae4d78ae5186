#include "bdm/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace bdm {

const char* to_string(Side s) {
  switch (s) {
    case Side::West: return "west";
    case Side::East: return "east";
    case Side::South: return "south";
    case Side::North: return "north";
  }
  return "?";
}

Side side_from_string(const std::string& s) {
  if (s == "west") return Side::West;
  if (s == "east") return Side::East;
  if (s == "south") return Side::South;
  if (s == "north") return Side::North;
  throw Error(ErrorCode::InvalidArgument, "unknown side '" + s + "'");
}

int side_direction(Side s) { return (s == Side::West || s == Side::East) ? 1 : 0; }
bool side_at_end(Side s) { return s == Side::East || s == Side::North; }

SideCurve side_curve(const Patch2D& patch, Side side) {
  const int dir = side_direction(side);
  const int n = patch.num_basis(dir);
  const int fixed = side_at_end(side) ? patch.num_basis(1 - dir) - 1 : 0;
  SideCurve c;
  c.knots = patch.knots(dir);
  c.indices.resize(n);
  c.homogeneous.resize(n, 3);
  const Matrix h = patch.homogeneous();
  for (int k = 0; k < n; ++k) {
    c.indices[k] = dir == 0 ? patch.index(k, fixed) : patch.index(fixed, k);
    c.homogeneous.row(k) = h.row(c.indices[k]);
  }
  return c;
}

Vec2 eval_side(const SideCurve& c, double xi, Vec2* tangent) {
  int first = 0;
  const Matrix d = bspline_eval_ders(c.knots, xi, 1, &first);
  Eigen::Vector3d h = Eigen::Vector3d::Zero(), dh = Eigen::Vector3d::Zero();
  for (int a = 0; a < d.cols(); ++a) {
    h += d(0, a) * c.homogeneous.row(first + a).transpose();
    dh += d(1, a) * c.homogeneous.row(first + a).transpose();
  }
  const Vec2 x = h.head<2>() / h[2];
  if (tangent) *tangent = (dh.head<2>() - x * dh[2]) / h[2];
  return x;
}

// ----------------------------------------------------------------- PatchSpace

PatchSpace::PatchSpace(const Patch2D& patch) : patch_(patch) {
  const int n = patch.num_basis(0) * patch.num_basis(1);
  standard_dof_.resize(n);
  for (int i = 0; i < n; ++i) standard_dof_[i] = i;
  num_dofs_ = n;
  refined_offset_ = n;
}

void PatchSpace::refine_side(Side side, const KnotVector& refined, const Matrix& refined_homogeneous) {
  if (refined_side_)
    throw Error(ErrorCode::ChainedSlave, "patch is already refined along another side");
  const auto curve = side_curve(patch_, side);
  if (refined.front() != curve.knots.front() || refined.back() != curve.knots.back() ||
      refined.degree() != curve.knots.degree())
    throw Error(ErrorCode::InvalidKnotVector, "refined side space does not match the side");
  if (refined_homogeneous.rows() != refined.num_basis() || refined_homogeneous.cols() != 3)
    throw Error(ErrorCode::DimensionMismatch, "refined side control net has wrong shape");
  refined_side_ = side;
  refined_knots_ = refined;
  refined_hom_ = refined_homogeneous;
  for (int idx : curve.indices) standard_dof_[idx] = -1;
  int next = 0;
  for (auto& d : standard_dof_)
    if (d >= 0) d = next++;
  refined_offset_ = next;
  num_dofs_ = next + refined.num_basis();
}

PatchSpace::Trace PatchSpace::trace(Side side) const {
  Trace t;
  if (refined_side_ && *refined_side_ == side) {
    t.knots = refined_knots_;
    t.homogeneous = refined_hom_;
    for (int k = 0; k < refined_knots_.num_basis(); ++k) t.dofs.push_back(refined_dof(k));
  } else {
    const auto curve = side_curve(patch_, side);
    t.knots = curve.knots;
    t.homogeneous = curve.homogeneous;
    for (int idx : curve.indices) t.dofs.push_back(standard_dof_[idx]);
    if (refined_side_ && side_direction(*refined_side_) != side_direction(side)) {
      // the end function shared with the refined side is a refined function
      const int k = side_at_end(side) ? refined_knots_.num_basis() - 1 : 0;
      const int pos = side_at_end(*refined_side_) ? static_cast<int>(t.dofs.size()) - 1 : 0;
      t.dofs[pos] = refined_dof(k);
    }
  }
  for (int r = 0; r < t.homogeneous.rows(); ++r) t.weights.push_back(t.homogeneous(r, 2));
  for (int d : t.dofs)
    if (d < 0) throw Error(ErrorCode::InvalidArgument, "side trace references a removed function");
  return t;
}

namespace {

// Kronecker row of a u-operator row and a v-operator row, index bu + (pu+1) bv.
void kron_row(const Eigen::Ref<const Eigen::RowVectorXd>& ru, const Eigen::Ref<const Eigen::RowVectorXd>& rv,
              double scale, Eigen::Ref<Eigen::RowVectorXd> out) {
  const int nu = static_cast<int>(ru.size());
  for (int bv = 0; bv < rv.size(); ++bv)
    for (int bu = 0; bu < nu; ++bu) out[bu + nu * bv] = scale * ru[bu] * rv[bv];
}

}  // namespace

std::vector<Element> PatchSpace::elements(int patch_id, int offset) const {
  const auto ops_u = extract(patch_.knots(0));
  const auto ops_v = extract(patch_.knots(1));
  const int pu = patch_.degree(0), pv = patch_.degree(1);
  const int nb = (pu + 1) * (pv + 1);
  const Matrix hom = patch_.homogeneous();
  const auto& w = patch_.weights();

  std::vector<ExtractionOperator> ops_r;
  int rdir = -1;
  if (refined_side_) {
    ops_r = extract(refined_knots_);
    rdir = side_direction(*refined_side_);
  }

  std::vector<Element> out;
  for (size_t ev = 0; ev < ops_v.size(); ++ev) {
    for (size_t eu = 0; eu < ops_u.size(); ++eu) {
      const auto& cu = ops_u[eu];
      const auto& cv = ops_v[ev];
      Element base;
      base.patch = patch_id;
      base.index = {static_cast<int>(eu), static_cast<int>(ev)};
      base.parent.lo = {cu.lo, cv.lo};
      base.parent.hi = {cu.hi, cv.hi};
      base.cell = base.parent;
      base.degree = {pu, pv};
      base.bezier = Matrix::Zero(nb, 3);
      Eigen::RowVectorXd row(nb);
      // standard functions (and geometry from all of them)
      std::vector<Eigen::RowVectorXd> rows;
      for (int b = 0; b <= pv; ++b)
        for (int a = 0; a <= pu; ++a) {
          const int idx = patch_.index(cu.first + a, cv.first + b);
          kron_row(cu.C.row(a), cv.C.row(b), 1.0, row);
          base.bezier += row.transpose() * hom.row(idx);
          if (standard_dof_[idx] < 0) continue;
          rows.push_back(w[idx] * row);
          base.dofs.push_back(offset + standard_dof_[idx]);
        }

      bool touches = false;
      if (refined_side_) {
        switch (*refined_side_) {
          case Side::West: touches = eu == 0; break;
          case Side::East: touches = eu + 1 == ops_u.size(); break;
          case Side::South: touches = ev == 0; break;
          case Side::North: touches = ev + 1 == ops_v.size(); break;
        }
      }
      if (!touches) {
        base.op.resize(static_cast<int>(rows.size()), nb);
        for (size_t r = 0; r < rows.size(); ++r) base.op.row(r) = rows[r];
        out.push_back(std::move(base));
        continue;
      }

      // transverse row of the boundary function
      const auto& ct = rdir == 0 ? cv : cu;
      const int pt = rdir == 0 ? pv : pu;
      const Eigen::RowVectorXd trow = side_at_end(*refined_side_) ? ct.C.row(pt) : ct.C.row(0);
      const auto& ca = rdir == 0 ? cu : cv;
      const int pa = rdir == 0 ? pu : pv;
      const BernsteinInterval parent(ca.lo, ca.hi, pa);
      for (const auto& cr : ops_r) {
        if (cr.lo < ca.lo || cr.hi > ca.hi) continue;
        Element el = base;
        el.cell.lo[rdir] = cr.lo;
        el.cell.hi[rdir] = cr.hi;
        const Matrix M = bernstein_transform(parent, BernsteinInterval(cr.lo, cr.hi, pa));
        const Matrix along = cr.C * M.transpose().inverse();
        el.op.resize(static_cast<int>(rows.size()) + pa + 1, nb);
        for (size_t r = 0; r < rows.size(); ++r) el.op.row(r) = rows[r];
        for (int k = 0; k <= pa; ++k) {
          const double wk = refined_hom_(cr.first + k, 2);
          if (rdir == 0)
            kron_row(along.row(k), trow, wk, row);
          else
            kron_row(trow, along.row(k), wk, row);
          el.op.row(static_cast<int>(rows.size()) + k) = row;
          el.dofs.push_back(offset + refined_dof(cr.first + k));
        }
        out.push_back(std::move(el));
      }
    }
  }
  return out;
}

Mesh build_patch_mesh(const std::vector<PatchSpace>& spaces, std::vector<int>* offsets) {
  Mesh mesh;
  if (offsets) offsets->clear();
  for (size_t p = 0; p < spaces.size(); ++p) {
    if (offsets) offsets->push_back(mesh.num_dofs);
    auto els = spaces[p].elements(static_cast<int>(p), mesh.num_dofs);
    mesh.elements.insert(mesh.elements.end(), std::make_move_iterator(els.begin()),
                         std::make_move_iterator(els.end()));
    mesh.patches.push_back(spaces[p].patch());
    mesh.num_dofs += spaces[p].num_dofs();
  }
  return mesh;
}

// ----------------------------------------------------------------- evaluation

ElementPoint eval_element(const Element& el, double u, double v) {
  const Matrix bu = bernstein_eval_ders(BernsteinInterval(el.parent.lo[0], el.parent.hi[0], el.degree[0]), u);
  const Matrix bv = bernstein_eval_ders(BernsteinInterval(el.parent.lo[1], el.parent.hi[1], el.degree[1]), v);
  const int nu = el.degree[0] + 1, nv = el.degree[1] + 1;
  const int nb = nu * nv;
  Vector B(nb), Bu(nb), Bv(nb);
  for (int b = 0; b < nv; ++b)
    for (int a = 0; a < nu; ++a) {
      B[a + nu * b] = bu(0, a) * bv(0, b);
      Bu[a + nu * b] = bu(1, a) * bv(0, b);
      Bv[a + nu * b] = bu(0, a) * bv(1, b);
    }
  const Eigen::Vector3d h = el.bezier.transpose() * B;
  const Eigen::Vector3d hu = el.bezier.transpose() * Bu;
  const Eigen::Vector3d hv = el.bezier.transpose() * Bv;
  const double W = h[2];
  if (!(W > 0.0)) throw Error(ErrorCode::InvalidWeights, "nonpositive weight function");

  ElementPoint pt;
  pt.x = h.head<2>() / W;
  pt.jacobian.col(0) = (hu.head<2>() - pt.x * hu[2]) / W;
  pt.jacobian.col(1) = (hv.head<2>() - pt.x * hv[2]) / W;
  pt.detj = pt.jacobian.determinant();

  const Vector num = el.op * B;
  pt.values = num / W;
  pt.dparam.resize(2, num.size());
  pt.dparam.row(0) = ((el.op * Bu - pt.values * hu[2]) / W).transpose();
  pt.dparam.row(1) = ((el.op * Bv - pt.values * hv[2]) / W).transpose();
  if (pt.detj != 0.0) pt.dphys = pt.jacobian.transpose().inverse() * pt.dparam;
  return pt;
}

bool cell_on_side(const Element& el, const Patch2D& patch, Side side) {
  switch (side) {
    case Side::West: return el.cell.lo[0] == patch.knots(0).front();
    case Side::East: return el.cell.hi[0] == patch.knots(0).back();
    case Side::South: return el.cell.lo[1] == patch.knots(1).front();
    case Side::North: return el.cell.hi[1] == patch.knots(1).back();
  }
  return false;
}

PatchPoint locate(const std::vector<Patch2D>& patches, const Vec2& x) {
  constexpr double tol = 1e-12;
  for (size_t p = 0; p < patches.size(); ++p) {
    const auto& patch = patches[p];
    const double u0 = patch.knots(0).front(), u1 = patch.knots(0).back();
    const double v0 = patch.knots(1).front(), v1 = patch.knots(1).back();
    for (double su : {0.5, 0.2, 0.8})
      for (double sv : {0.5, 0.2, 0.8}) {
        double u = u0 + su * (u1 - u0), v = v0 + sv * (v1 - v0);
        bool ok = false;
        for (int it = 0; it < 50; ++it) {
          const auto e = nurbs_eval(patch, u, v);
          const Vec2 r = e.x - x;
          const double scale = std::max(1.0, x.norm());
          if (r.norm() < 1e-14 * scale) {
            ok = true;
            break;
          }
          const Vec2 d = e.jacobian.fullPivLu().solve(r);
          u = std::clamp(u - d[0], u0, u1);
          v = std::clamp(v - d[1], v0, v1);
          if (d.norm() < 1e-15 * std::max(1.0, std::abs(u1 - u0))) {
            ok = (nurbs_eval(patch, u, v).x - x).norm() < 1e-10 * scale;
            break;
          }
        }
        if (ok && u >= u0 - tol && u <= u1 + tol && v >= v0 - tol && v <= v1 + tol)
          return {static_cast<int>(p), u, v};
      }
  }
  throw Error(ErrorCode::OutOfDomain, "point is not inside any patch");
}

}  // namespace bdm
