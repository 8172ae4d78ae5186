#pragma once

#include <vector>

#include <Eigen/Sparse>

#include "bdm/spline.hpp"

namespace bdm {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

enum class DofRole { MasterDistinct, MasterInterface, SlaveInterface, SlaveDistinct };

/// Sparse stiffness (or tangent) and load vector over scalar DOFs. Vector
/// problems interleave components: scalar index = dof * ncomp + c.
struct AssembledSystem {
  SparseMatrix K;
  Vector f;
  int ncomp = 1;
  std::vector<DofRole> roles;  ///< per node DOF, optional

  int size() const { return static_cast<int>(f.size()); }
};

/// Map from reduced (independent) DOFs to the full DOF set: full = T * reduced.
struct Constraint {
  int num_full = 0;
  int num_reduced = 0;
  SparseMatrix T;
  std::vector<int> reduced_of_full;  ///< -1 for dependent DOFs
  std::vector<int> full_of_reduced;

  /// Scalar-DOF version for ncomp interleaved components.
  SparseMatrix expanded(int ncomp) const;
};

}  // namespace bdm
