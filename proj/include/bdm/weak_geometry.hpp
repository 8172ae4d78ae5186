#pragma once

#include <vector>

#include "bdm/mortar.hpp"

namespace bdm {

/// R̃ = Ge^T Re: master interface functions in the slave element's Bernstein basis.
Matrix weak_interface_operator(const Matrix& Ge, const Matrix& Re);
/// R̃ = Ge^T Re_r M^{-T} for a refined sub-element, in parent Bernstein coordinates.
Matrix refined_weak_interface_operator(const Matrix& Ge_r, const Matrix& Re_r, const Matrix& M);
/// [R1 (x) R_xi; R2 (x) Rt_xi]: rows of interior transverse functions keep the
/// standard interface-direction operator, interface rows take the weak one.
Matrix tensor_weak_patch_operator(const Matrix& R1, const Matrix& R_xi, const Matrix& R2,
                                  const Matrix& Rt_xi);

struct WeakExtractionOperator {
  int element = 0;
  Matrix R;               ///< rows: reduced functions, columns: Bernstein polynomials
  std::vector<int> dofs;  ///< reduced global DOF of each row
};

/// Element stream over the reduced DOF set. Elements keep their cells and
/// geometry; only the operators and DOF maps change.
struct WeakMultiPatchMesh {
  Mesh mesh;
  int num_full = 0;  ///< DOF count of the unconstrained union
  std::vector<int> full_of_reduced;

  WeakExtractionOperator op(int e) const;
};

WeakMultiPatchMesh build_weak_mesh(const MortarMesh& mortar);
WeakMultiPatchMesh build_weak_mesh(const MultiPatchModel& model, int dual_level);

}  // namespace bdm
