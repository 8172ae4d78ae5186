#pragma once

#include <functional>
#include <map>
#include <vector>

#include "bdm/mortar.hpp"
#include "bdm/system.hpp"

namespace bdm {

enum class ExecutionPolicy { Serial, Parallel };

struct MaterialModel {
  enum class Kind { Poisson, LinearElastic, NeoHookean };
  Kind kind = Kind::Poisson;
  double E = 1.0;
  double nu = 0.0;
  bool plane_stress = false;

  double lambda() const;
  double mu() const;
  void validate() const;

  static MaterialModel poisson() { return {}; }
  static MaterialModel linear_elastic(double E, double nu, bool plane_stress = false);
  static MaterialModel neo_hookean(double E, double nu);
};

using ScalarField = std::function<double(const Vec2&)>;
using VectorField = std::function<Vec2(const Vec2&)>;

/// Parametric quadrature point of an element cell; w excludes |det J|.
struct QuadPoint {
  double u, v, w;
};
/// (p+1+extra) Gauss points per direction on the cell, or the parent element's
/// points inside the cell when parent_quadrature is set.
std::vector<QuadPoint> element_rule(const Element& el, int extra = 0);

AssembledSystem assemble_poisson(const Mesh& mesh, const ScalarField& f,
                                 ExecutionPolicy policy = ExecutionPolicy::Parallel);
AssembledSystem assemble_linear_elasticity(const Mesh& mesh, const MaterialModel& material,
                                           const VectorField& body = nullptr,
                                           ExecutionPolicy policy = ExecutionPolicy::Parallel);

/// Boundary load on one patch side: flux (ncomp = 1) or traction. The load
/// receives the point and the outward unit normal. `breaks` are side
/// parameters where the load is discontinuous.
struct BoundaryLoad {
  int patch = 0;
  Side side = Side::West;
  std::function<Vector(const Vec2& x, const Vec2& n)> load;
  std::vector<double> breaks;
};

/// Load vector contribution of boundary loads on the mesh DOFs.
Vector boundary_load_vector(const Mesh& mesh, int ncomp, const std::vector<BoundaryLoad>& loads);
void add_boundary_loads(AssembledSystem& system, const Mesh& mesh, const std::vector<BoundaryLoad>& loads);

/// Dirichlet data on a patch side for one component (-1: all components).
struct DirichletCondition {
  int patch = 0;
  Side side = Side::West;
  int component = -1;
  std::function<double(const Vec2&, int comp)> value;
};

/// Prescribed values keyed by full scalar index (dof * ncomp + comp).
using DirichletValues = std::map<int, double>;

/// L2 projection of the data on each side trace with interpolated end values.
DirichletValues project_dirichlet(const MortarMesh& mesh, const std::vector<DirichletCondition>& conds,
                                  int ncomp);
/// Full DOF of the interpolatory function at a patch corner: the first or last
/// function of the trace of `side`.
int corner_dof(const MortarMesh& mesh, int patch, Side side, bool at_end);
/// Add a value, rejecting conflicting values for the same DOF.
void add_dirichlet_value(DirichletValues& values, int index, double value);
/// Values restricted to independent DOFs and renumbered to the reduced set.
DirichletValues reduce_dirichlet(const DirichletValues& values, const Constraint& c, int ncomp);
/// Symmetric elimination: rows and columns cleared, unit diagonal.
void apply_dirichlet(AssembledSystem& system, const DirichletValues& values);

/// Sparse direct solve; symmetric systems use LDL^T with an LU fallback.
/// Throws SingularMatrix on failure or relative residual above 1e-10.
Vector linear_solve(const SparseMatrix& A, const Vector& b, bool symmetric = true);
Vector linear_solve(const AssembledSystem& system);

/// Coefficients over the DOFs of an element stream.
class SolutionField {
 public:
  SolutionField() = default;
  SolutionField(Mesh mesh, Vector coeffs, int ncomp);

  const Mesh& mesh() const { return mesh_; }
  const Vector& coeffs() const { return coeffs_; }
  int ncomp() const { return ncomp_; }

  /// Element index of the cell containing (u, v) on a patch.
  int find_element(int patch, double u, double v) const;
  Vector value(int patch, double u, double v) const;
  /// Rows: components; columns: d/dx, d/dy.
  Matrix gradient(int patch, double u, double v) const;
  Vector value_at(const Vec2& x) const;

  /// Local coefficients of element e (nloc x ncomp).
  Matrix local(int e) const;

 private:
  Mesh mesh_;
  Vector coeffs_;
  int ncomp_ = 1;
  std::vector<std::vector<int>> by_patch_;
};

/// Lift reduced coefficients to the full DOFs: full = T x per component.
Vector expand_solution(const Constraint& c, const Vector& reduced, int ncomp);

/// sqrt(int |u_h - u|^2) with p+2 Gauss points per direction per cell.
double l2_error(const SolutionField& s, const std::function<Vector(const Vec2&)>& exact);
/// L2 error of one Cauchy stress component (0 xx, 1 yy, 2 xy), linear elasticity.
double stress_l2_error(const SolutionField& s, const MaterialModel& m, int component,
                       const ScalarField& exact);
/// Cauchy stress (xx, yy, xy) at a parametric point.
Eigen::Vector3d stress_at(const SolutionField& s, const MaterialModel& m, int patch, double u, double v);
/// L2 norm of a - b over a's cells split at the physical breakpoint lines of
/// both meshes; assumes axis-aligned affine patch maps.
double l2_difference(const SolutionField& a, const SolutionField& b);
/// L2 norm over each interface of the slave trace minus the master trace.
double interface_jump(const SolutionField& s, const MortarMesh& mesh);

// ----------------------------------------------------------- hyperelasticity

struct ResidualTangent {
  Vector residual;  ///< internal minus external forces, mesh DOFs
  SparseMatrix tangent;
};

/// Neo-Hookean plane strain, total Lagrangian, on the mesh DOFs (ncomp 2).
/// `state` holds displacement coefficients; external = scale * f_ext.
ResidualTangent neo_hookean_step(const Mesh& mesh, const MaterialModel& material, double scale,
                                 const Vector& state, const Vector& f_ext,
                                 ExecutionPolicy policy = ExecutionPolicy::Parallel);
/// Strain energy density for a deformation gradient.
double neo_hookean_energy(const MaterialModel& material, const Mat2& F);

struct NonlinearProblem {
  Mesh mesh;
  MaterialModel material;
  Constraint constraint;   ///< mesh DOFs -> unknowns
  std::vector<int> fixed;  ///< reduced scalar indices held at zero
  Vector f_ext;            ///< full load on mesh DOFs
};

struct LoadSteppingResult {
  Vector state;  ///< mesh DOFs
  std::vector<int> iterations;
};

/// Equal increments of the load; plain Newton per increment converging when
/// the residual drops by tol_factor. Throws NewtonDivergence with the
/// increment index and last residual otherwise.
LoadSteppingResult newton_load_stepping(const NonlinearProblem& problem, int increments = 20,
                                        double tol_factor = 1e8, int max_iter = 25,
                                        ExecutionPolicy policy = ExecutionPolicy::Parallel);

}  // namespace bdm
