#pragma once

#include <vector>

#include "bdm/bezier_projection.hpp"
#include "bdm/mesh.hpp"
#include "bdm/system.hpp"

namespace bdm {

/// Slave-to-master parametric map phi = (x^m)^{-1} o x^s along an interface,
/// evaluated by Newton-Raphson on the master boundary curve.
class CompositionalMap {
 public:
  CompositionalMap() = default;
  CompositionalMap(SideCurve slave, SideCurve master, double tol = 1e-12, int max_iter = 50);

  double operator()(double xi) const;
  /// Slave parameter of a master parameter.
  double inverse(double eta) const;
  bool reversed() const { return reversed_; }
  /// Affine to within 1e-10 at sample points.
  bool is_affine() const;

  const SideCurve& slave() const { return slave_; }
  const SideCurve& master() const { return master_; }

 private:
  double solve(const SideCurve& target, const Vec2& x, double guess) const;

  SideCurve slave_, master_;
  bool reversed_ = false;
  double tol_ = 1e-12;
  int max_iter_ = 50;
  double scale_ = 1.0;
};

CompositionalMap build_phi(const InterfaceSpec& iface, const std::vector<Patch2D>& patches);

/// Slave breakpoints merged with the slave images of all master breakpoints.
std::vector<double> project_master_knots(const CompositionalMap& phi, const KnotVector& slave_knots,
                                         double dedup_tol = 1e-10);

struct RefinedDualSpace {
  KnotVector knots;    ///< refined slave interface space N^r
  Matrix homogeneous;  ///< refined boundary control net (w x, w y, w)
  int level = 0;
  /// Integration cells along the interface for slave elements touching it.
  std::vector<std::pair<double, double>> cells;
};

RefinedDualSpace refine_dual_space(const KnotVector& slave_knots, const Matrix& slave_homogeneous,
                                   const CompositionalMap& phi, int n);

struct CouplingMatrix {
  Matrix G;  ///< slave interface functions x master interface functions
  bool matched = false;
  int level = 0;
};

/// Trace space of the master side used in coupling.
struct MasterTrace {
  KnotVector knots;
  std::vector<double> weights;
};

/// G_IJ = int N̄_I(xi) R^m_J(phi(xi)) dxi over the merged segments, Gauss with
/// quad_order points per segment (0 selects max(p_m, p_s) + 1).
CouplingMatrix assemble_coupling(const DualBasis& dual, const MasterTrace& master,
                                 const CompositionalMap& phi, int quad_order = 0);

struct InterfaceCoupling {
  InterfaceSpec spec;
  CompositionalMap phi;
  RefinedDualSpace refined;
  DualBasis dual;
  CouplingMatrix coupling;
  std::vector<int> slave_dofs;   ///< global full DOFs, one per G row
  std::vector<int> master_dofs;  ///< global full DOFs, one per G column
};

/// Multi-patch mesh with mortar interfaces: the patch-wise element stream over
/// the full DOF set and the constraint eliminating slave interface DOFs.
struct MortarMesh {
  MultiPatchModel model;
  std::vector<PatchSpace> spaces;
  std::vector<int> offsets;
  Mesh mesh;
  std::vector<InterfaceCoupling> couplings;
  Constraint constraint;
  int dual_level = 0;

  /// Role of each full DOF (patch master/slave status per interface).
  std::vector<DofRole> roles() const;
};

/// `subdivide_cells = false` keeps whole Bezier elements as quadrature cells
/// next to a refined interface (used to expose the quadrature error).
MortarMesh build_mortar_mesh(const MultiPatchModel& model, int dual_level, int quad_order = 0,
                             bool subdivide_cells = true);

/// Slave rows expressed through master DOFs; chains are resolved by
/// substitution, cycles are rejected. A DOF constrained by two interfaces
/// keeps the first interface's row.
Constraint build_constraint(int num_full, const std::vector<InterfaceCoupling>& couplings);
/// Single-interface constraint from G and the DOF lists.
Constraint build_constraint(int num_full, const CouplingMatrix& G, const std::vector<int>& slave_dofs,
                            const std::vector<int>& master_dofs);

/// T^T K T and T^T f with T acting blockwise per component.
AssembledSystem condense(const AssembledSystem& system, const Constraint& constraint);
AssembledSystem condense(const AssembledSystem& system, const CouplingMatrix& G,
                         const std::vector<int>& slave_dofs, const std::vector<int>& master_dofs);

/// Indefinite system [K B^T; B 0] with one multiplier per slave interface
/// function and component; B = [K^{lm}^T, -K^{ls}^T] over the full DOFs.
struct SaddleSystem {
  SparseMatrix A;
  Vector rhs;
  int num_primal = 0;
  SparseMatrix K_lm;  ///< master DOFs x multipliers (scalar problem)
  SparseMatrix K_ls;  ///< slave DOFs x multipliers (scalar problem)
};
SaddleSystem assemble_saddle(const AssembledSystem& system, const MortarMesh& mesh);

}  // namespace bdm
