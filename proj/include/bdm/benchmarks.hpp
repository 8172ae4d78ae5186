#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdm/fem.hpp"
#include "bdm/weak_geometry.hpp"

namespace bdm {

/// Master to slave element-count ratio of the level-0 meshes.
struct Ratio {
  int master = 2;
  int slave = 3;
  std::string str() const { return std::to_string(master) + ":" + std::to_string(slave); }
  static Ratio parse(const std::string& s);
};

enum class CaseId {
  SquareDirichlet,
  SquareMixed,
  Annulus,
  PlateHole2,
  PlateHole3,
  LargeDef1,
  LargeDef2,
  LargeDef3,
  Fig4
};

const char* to_string(CaseId id);
CaseId case_from_string(const std::string& s);

enum class Method { Mortar, Weak, Saddle };
const char* to_string(Method m);
Method method_from_string(const std::string& s);

struct BenchmarkCase {
  CaseId id = CaseId::SquareMixed;
  int p = 2;
  Ratio ratio{2, 3};
  bool matched = true;
  int n = 1;  ///< dual refinement level
  std::vector<int> levels{0, 1, 2, 3};
  std::uint32_t seed = 42;
};

// ------------------------------------------------------------------ generators

/// Bezier degree elevation of homogeneous control rows, `times` steps.
Matrix bezier_elevate(const Matrix& hom, int times);

/// Unit square split at x = 1/2; master (patch 0) on the left. Level l has
/// ratio.master * 2^l and ratio.slave * 2^l elements per direction.
MultiPatchModel gen_square_two_patch(Ratio ratio, bool matched, int p, int level = 0,
                                     std::uint32_t seed = 42);
/// Quarter annulus 0.4 <= r <= 4, pi/2 <= theta <= pi, split at theta = 3 pi/4.
MultiPatchModel gen_annulus_two_patch(Ratio ratio, int p, int level = 0);
/// Quarter plate [0, L]^2 minus the hole of radius R.
MultiPatchModel gen_plate_hole(int npatches, bool matched, int p, int level = 0, Ratio ratio = {2, 3},
                               double R = 1.0, double L = 4.0, std::uint32_t seed = 42);
/// Two quadratic patches of the worked extraction example: slave (patch 1)
/// below with u knots {0,0,0,1/3,2/3,1,1,1}, master above with {0,0,0,1/2,1,1,1}.
MultiPatchModel gen_fig4();
/// Unit square split at x = 1/2; master n x n, slave n x (n+1) elements, or
/// n x n for the conforming reference.
MultiPatchModel gen_largedef(int n, bool conforming, int p = 2);

// ----------------------------------------------------------- exact solutions

struct PlateStress {
  double rr, tt, rt;
  double xx, yy, xy;
};
/// Kirsch solution for uniaxial tension Tx along x.
PlateStress exact_plate_stress(double r, double theta, double Tx = 10.0, double R = 1.0);

struct ManufacturedFields {
  ScalarField u;
  ScalarField f;  ///< -Laplacian of u
  VectorField grad;
};
ManufacturedFields manufactured_fields(CaseId id);

// ------------------------------------------------------------------ problems

/// Geometry of a case at a refinement level (level l of a large deformation
/// case has 2^l master elements per direction).
MultiPatchModel case_model(const BenchmarkCase& c, int level);

/// A discretized benchmark instance: mortar mesh, loads, and constraints.
struct CaseSetup {
  BenchmarkCase spec;
  int level = 0;
  MortarMesh mesh;
  MaterialModel material;
  int ncomp = 1;
  ScalarField forcing;
  std::vector<BoundaryLoad> loads;
  DirichletValues dirichlet;  ///< full scalar indices
};

CaseSetup setup_case(const BenchmarkCase& c, int level);

struct CaseSolution {
  SolutionField field;
  int dofs = 0;          ///< unknowns of the solved system
  double residual = 0.0; ///< relative residual of the solve
  double error = 0.0;    ///< L2 error (u, or sigma_xx for the plate)
};

/// Linear benchmark solve along the selected assembly path.
CaseSolution solve_case(const CaseSetup& setup, Method method);
/// Error measure of a linear case: L2 of u, or of sigma_xx for the plate.
double case_error(const CaseSetup& setup, const SolutionField& field);

/// Assembled linear system for a method before Dirichlet elimination:
/// condensed (mortar), weak-mesh, or the full unconstrained system.
AssembledSystem assemble_case(const CaseSetup& setup, Method method, WeakMultiPatchMesh* weak = nullptr,
                              ExecutionPolicy policy = ExecutionPolicy::Parallel);

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  int dofs = 0;
  double l2_error = 0.0;
  std::optional<double> rate;
  std::string status = "ok";
};

struct ConvergenceReport {
  BenchmarkCase spec;
  std::vector<ConvergenceRow> rows;
  bool failed = false;
  /// Rate of the last row (NaN when unavailable).
  double final_rate() const;
};

/// rate_r = log(e_{r-1}/e_r) / log(h_{r-1}/h_r), filled in place.
void compute_rates(ConvergenceReport& report);

ConvergenceReport run_convergence(const BenchmarkCase& c, Method method = Method::Mortar);

/// Large deformation solve on the weak (nonconforming) or conforming mesh.
struct LargeDefSolution {
  SolutionField field;
  std::vector<int> iterations;
};
LargeDefSolution solve_large_deformation(CaseId id, int n, bool conforming, int p = 2, int increments = 20,
                                         double E = 30e9, double nu = 0.48, double pmax = 100e9);

/// e_r = ||u^w - u^c||_L2 per level n for one load case.
ConvergenceReport weak_vs_conforming_relative_error(CaseId id, const std::vector<int>& ns, int p = 2,
                                                    int increments = 20, double pmax = 100e9);

}  // namespace bdm
