#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "bdm/spline.hpp"

namespace bdm {

/// Tensor-product patch edges: West u=0, East u=1, South v=0, North v=1.
enum class Side { West, East, South, North };

const char* to_string(Side s);
Side side_from_string(const std::string& s);
/// Parametric direction running along the side (0 = u, 1 = v).
int side_direction(Side s);
/// Whether the side sits at the upper end of the transverse direction.
bool side_at_end(Side s);

struct InterfaceSpec {
  int master_patch = 0;
  Side master_side = Side::East;
  int slave_patch = 1;
  Side slave_side = Side::West;
  /// Parametric directions run opposite ways; detected from geometry when
  /// the interface is built and checked against this flag if set.
  std::optional<bool> reversed;
};

struct MultiPatchModel {
  std::vector<Patch2D> patches;
  std::vector<InterfaceSpec> interfaces;
};

/// Boundary curve of a patch side: knots, homogeneous control values, and the
/// patch control indices in order of increasing side parameter.
struct SideCurve {
  KnotVector knots;
  Matrix homogeneous;  ///< rows (w x, w y, w)
  std::vector<int> indices;
};

SideCurve side_curve(const Patch2D& patch, Side side);
Vec2 eval_side(const SideCurve& c, double xi, Vec2* tangent = nullptr);

struct Box {
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
};

/// One integration cell of the extracted-element stream. Local function a is
/// (op.row(a) . B) / (bezier.col(2) . B) with B the tensor Bernstein basis of
/// the parent Bezier element, index bu + (pu + 1) * bv.
struct Element {
  int patch = 0;
  std::array<int, 2> index{0, 0};  ///< Bezier element indices in u, v
  Box parent;
  Box cell;
  std::array<int, 2> degree{1, 1};
  Matrix op;              ///< nloc x nb weighted numerators
  std::vector<int> dofs;  ///< global scalar DOF of each row
  Matrix bezier;          ///< nb x 3 homogeneous Bezier control points
  /// Integrate with the parent element's Gauss points falling inside the cell.
  bool parent_quadrature = false;
};

/// Function space of one patch: the tensor basis, with the functions of one
/// side optionally replaced by the tensor partner of a refined side basis.
class PatchSpace {
 public:
  PatchSpace() = default;
  explicit PatchSpace(const Patch2D& patch);

  /// Replace the functions along `side` by those of the refined side curve.
  void refine_side(Side side, const KnotVector& refined, const Matrix& refined_homogeneous);

  const Patch2D& patch() const { return patch_; }
  int num_dofs() const { return num_dofs_; }
  std::optional<Side> refined_side() const { return refined_side_; }
  const KnotVector& refined_knots() const { return refined_knots_; }
  const Matrix& refined_homogeneous() const { return refined_hom_; }

  /// Patch-local DOF of standard function (i, j), or -1 if replaced.
  int standard_dof(int i, int j) const { return standard_dof_[patch_.index(i, j)]; }
  int refined_dof(int k) const { return refined_offset_ + k; }

  /// DOFs whose traces span the side, in order of increasing side parameter,
  /// together with the trace knots and weights.
  struct Trace {
    std::vector<int> dofs;
    KnotVector knots;
    std::vector<double> weights;
    Matrix homogeneous;
  };
  Trace trace(Side side) const;

  /// Cells and operators of all elements of this patch; DOFs offset by `offset`.
  std::vector<Element> elements(int patch_id, int offset) const;

 private:
  Patch2D patch_;
  std::vector<int> standard_dof_;
  std::optional<Side> refined_side_;
  KnotVector refined_knots_;
  Matrix refined_hom_;
  int refined_offset_ = 0;
  int num_dofs_ = 0;
};

/// Extracted multi-patch mesh: a stream of elements over a global DOF set.
struct Mesh {
  std::vector<Patch2D> patches;
  std::vector<Element> elements;
  int num_dofs = 0;
};

/// Standard extracted mesh of independent patches (no coupling).
Mesh build_patch_mesh(const std::vector<PatchSpace>& spaces, std::vector<int>* offsets = nullptr);

/// Per-point evaluation of an element's basis and geometry.
struct ElementPoint {
  Vec2 x;
  Mat2 jacobian;   ///< dx/dxi
  double detj = 0.0;
  Vector values;   ///< nloc
  Matrix dparam;   ///< 2 x nloc parametric gradients
  Matrix dphys;    ///< 2 x nloc physical gradients
};

ElementPoint eval_element(const Element& el, double u, double v);

/// Whether the cell's edge lies on the given patch side of its patch domain.
bool cell_on_side(const Element& el, const Patch2D& patch, Side side);

/// Locate (patch, u, v) of a physical point by Newton on every patch; throws
/// OutOfDomain when no patch contains it.
struct PatchPoint {
  int patch = 0;
  double u = 0.0, v = 0.0;
};
PatchPoint locate(const std::vector<Patch2D>& patches, const Vec2& x);

}  // namespace bdm
