#include "bdm/weak_geometry.hpp"

#include <algorithm>
#include <map>

namespace bdm {

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

}  // namespace

Matrix weak_interface_operator(const Matrix& Ge, const Matrix& Re) {
  if (Ge.rows() != Re.rows()) throw Error(ErrorCode::DimensionMismatch, "Ge and Re row counts differ");
  return Ge.transpose() * Re;
}

Matrix refined_weak_interface_operator(const Matrix& Ge_r, const Matrix& Re_r, const Matrix& M) {
  if (Ge_r.rows() != Re_r.rows() || Re_r.cols() != M.rows() || M.rows() != M.cols())
    throw Error(ErrorCode::DimensionMismatch, "inconsistent refined operator dimensions");
  Eigen::FullPivLU<Matrix> lu(M.transpose());
  if (!lu.isInvertible()) throw Error(ErrorCode::SingularMatrix, "Bernstein transform is singular");
  return Ge_r.transpose() * Re_r * lu.inverse();
}

Matrix tensor_weak_patch_operator(const Matrix& R1, const Matrix& R_xi, const Matrix& R2,
                                  const Matrix& Rt_xi) {
  if (R1.cols() != R2.cols() || R_xi.cols() != Rt_xi.cols())
    throw Error(ErrorCode::DimensionMismatch, "inconsistent tensor operator dimensions");
  const Matrix top = kron(R1, R_xi), bottom = kron(R2, Rt_xi);
  Matrix out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

WeakExtractionOperator WeakMultiPatchMesh::op(int e) const {
  const auto& el = mesh.elements.at(e);
  return {e, el.op, el.dofs};
}

WeakMultiPatchMesh build_weak_mesh(const MortarMesh& mortar) {
  const Constraint& c = mortar.constraint;
  WeakMultiPatchMesh out;
  out.num_full = c.num_full;
  out.full_of_reduced = c.full_of_reduced;
  out.mesh.patches = mortar.mesh.patches;
  out.mesh.num_dofs = c.num_reduced;
  // row-major access to T
  Eigen::SparseMatrix<double, Eigen::RowMajor> T = c.T;
  for (const auto& el : mortar.mesh.elements) {
    Element w = el;
    std::vector<int> order;
    std::map<int, Eigen::RowVectorXd> rows;
    std::vector<int> derived;
    for (int a = 0; a < static_cast<int>(el.dofs.size()); ++a) {
      const int d = el.dofs[a];
      const bool independent = c.reduced_of_full[d] >= 0;
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(T, d); it; ++it) {
        const int r = static_cast<int>(it.col());
        auto [pos, fresh] = rows.try_emplace(r, Eigen::RowVectorXd::Zero(el.op.cols()));
        pos->second += it.value() * el.op.row(a);
        if (fresh) (independent ? order : derived).push_back(r);
      }
    }
    std::sort(derived.begin(), derived.end());
    order.insert(order.end(), derived.begin(), derived.end());
    w.op.resize(static_cast<int>(order.size()), el.op.cols());
    w.dofs = order;
    for (size_t k = 0; k < order.size(); ++k) w.op.row(static_cast<int>(k)) = rows[order[k]];
    out.mesh.elements.push_back(std::move(w));
  }
  return out;
}

WeakMultiPatchMesh build_weak_mesh(const MultiPatchModel& model, int dual_level) {
  return build_weak_mesh(build_mortar_mesh(model, dual_level));
}

}  // namespace bdm
