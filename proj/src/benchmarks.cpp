#include "bdm/benchmarks.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace bdm {

using std::numbers::pi;

Ratio Ratio::parse(const std::string& s) {
  const auto colon = s.find(':');
  Ratio r;
  try {
    if (colon == std::string::npos) throw std::invalid_argument(s);
    size_t used = 0;
    r.master = std::stoi(s.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument(s);
    const std::string rest = s.substr(colon + 1);
    r.slave = std::stoi(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(s);
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidArgument, "ratio must look like 2:3, got '" + s + "'");
  }
  if (r.master < 1 || r.slave < 1) throw Error(ErrorCode::InvalidArgument, "ratio entries must be positive");
  return r;
}

namespace {

const std::pair<CaseId, const char*> kCaseNames[] = {
    {CaseId::SquareDirichlet, "square-dirichlet"},
    {CaseId::SquareMixed, "square-mixed"},
    {CaseId::Annulus, "annulus"},
    {CaseId::PlateHole2, "plate-hole-2patch"},
    {CaseId::PlateHole3, "plate-hole-3patch"},
    {CaseId::LargeDef1, "largedef-case1"},
    {CaseId::LargeDef2, "largedef-case2"},
    {CaseId::LargeDef3, "largedef-case3"},
    {CaseId::Fig4, "fig4"},
};

}  // namespace

const char* to_string(CaseId id) {
  for (auto [c, name] : kCaseNames)
    if (c == id) return name;
  return "?";
}

CaseId case_from_string(const std::string& s) {
  for (auto [c, name] : kCaseNames)
    if (s == name) return c;
  if (s == "square") return CaseId::SquareMixed;
  if (s == "plate-hole") return CaseId::PlateHole2;
  throw Error(ErrorCode::InvalidArgument, "unknown case '" + s + "'");
}

const char* to_string(Method m) {
  switch (m) {
    case Method::Mortar: return "mortar";
    case Method::Weak: return "weak";
    case Method::Saddle: return "saddle";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  if (s == "mortar") return Method::Mortar;
  if (s == "weak") return Method::Weak;
  if (s == "saddle") return Method::Saddle;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + s + "'");
}

// ------------------------------------------------------------------ generators

Matrix bezier_elevate(const Matrix& hom, int times) {
  Matrix cur = hom;
  for (int t = 0; t < times; ++t) {
    const int p = static_cast<int>(cur.rows()) - 1;
    Matrix next(p + 2, cur.cols());
    next.row(0) = cur.row(0);
    next.row(p + 1) = cur.row(p);
    for (int i = 1; i <= p; ++i) {
      const double a = static_cast<double>(i) / (p + 1);
      next.row(i) = a * cur.row(i - 1) + (1.0 - a) * cur.row(i);
    }
    cur = next;
  }
  return cur;
}

namespace {

Matrix line(const Vec2& a, const Vec2& b) {
  Matrix h(2, 3);
  h << a[0], a[1], 1.0, b[0], b[1], 1.0;
  return h;
}

/// 45-degree style circular arc as a rational quadratic, centred at the origin.
Matrix arc(double r, double t0, double t1) {
  const double half = 0.5 * (t1 - t0);
  const double w = std::cos(half);
  const double tm = 0.5 * (t0 + t1);
  Matrix h(3, 3);
  h << r * std::cos(t0), r * std::sin(t0), 1.0,  //
      r * std::cos(tm), r * std::sin(tm), w,  //
      r * std::cos(t1), r * std::sin(t1), 1.0;
  return h;
}

/// Rational quadratic straight segment a-m-b sharing the arc weights.
Matrix rational_line(const Vec2& a, const Vec2& m, const Vec2& b, double w) {
  Matrix h(3, 3);
  h << a[0], a[1], 1.0, w * m[0], w * m[1], w, b[0], b[1], 1.0;
  return h;
}

/// Surface ruled between two Bezier curves of equal degree and weights,
/// elevated to degree p in both directions and split into eu x ev elements.
Patch2D ruled_patch(const Matrix& bottom, const Matrix& top, int p, int eu, int ev) {
  const int q = static_cast<int>(bottom.rows()) - 1;
  if (p < q) throw Error(ErrorCode::InvalidArgument, "degree below the geometry degree");
  const Matrix b = bezier_elevate(bottom, p - q), t = bezier_elevate(top, p - q);
  Matrix hom((p + 1) * (p + 1), 3);
  for (int j = 0; j <= p; ++j)
    for (int i = 0; i <= p; ++i) {
      const double s = static_cast<double>(j) / p;
      hom.row(i + (p + 1) * j) = (1.0 - s) * b.row(i) + s * t.row(i);
    }
  const KnotVector k = KnotVector::uniform(p, 1);
  Patch2D patch = Patch2D::from_homogeneous(k, k, hom);
  auto interior = [](int e) {
    std::vector<double> x;
    for (int i = 1; i < e; ++i) x.push_back(static_cast<double>(i) / e);
    return x;
  };
  const auto xu = interior(eu), xv = interior(ev);
  if (!xu.empty()) patch = patch.refined(0, xu);
  if (!xv.empty()) patch = patch.refined(1, xv);
  return patch;
}

/// Move the interior control points of a straight patch side along the side.
void perturb_side(Patch2D& patch, Side side, double amount, std::mt19937& rng) {
  const auto curve = side_curve(patch, side);
  const Vec2 a = patch.points()[curve.indices.front()], b = patch.points()[curve.indices.back()];
  const Vec2 t = (b - a).normalized();
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  for (size_t k = 1; k + 1 < curve.indices.size(); ++k) patch.points()[curve.indices[k]] += amount * dist(rng) * t;
}

}  // namespace

MultiPatchModel gen_square_two_patch(Ratio ratio, bool matched, int p, int level, std::uint32_t seed) {
  if (p < 1 || level < 0) throw Error(ErrorCode::InvalidArgument, "invalid degree or level");
  MultiPatchModel m;
  auto square = [&](double x0, double x1, int e) {
    return ruled_patch(line({x0, 0.0}, {x1, 0.0}), line({x0, 1.0}, {x1, 1.0}), p, e, e);
  };
  m.patches.push_back(square(0.0, 0.5, ratio.master));
  m.patches.push_back(square(0.5, 1.0, ratio.slave));
  if (!matched) {
    std::mt19937 rng(seed);
    perturb_side(m.patches[0], Side::East, 0.1 / ratio.master, rng);
    perturb_side(m.patches[1], Side::West, 0.1 / ratio.slave, rng);
  }
  for (auto& patch : m.patches) patch = patch.uniformly_refined(level);
  m.interfaces.push_back({0, Side::East, 1, Side::West, std::nullopt});
  return m;
}

MultiPatchModel gen_annulus_two_patch(Ratio ratio, int p, int level) {
  if (p < 2 || level < 0) throw Error(ErrorCode::InvalidArgument, "annulus needs p >= 2");
  MultiPatchModel m;
  auto sector = [&](double t0, double t1, int e) {
    return ruled_patch(arc(0.4, t0, t1), arc(4.0, t0, t1), p, e, e);
  };
  m.patches.push_back(sector(pi / 2, 3 * pi / 4, ratio.master));
  m.patches.push_back(sector(3 * pi / 4, pi, ratio.slave));
  for (auto& patch : m.patches) patch = patch.uniformly_refined(level);
  m.interfaces.push_back({0, Side::East, 1, Side::West, std::nullopt});
  return m;
}

MultiPatchModel gen_plate_hole(int npatches, bool matched, int p, int level, Ratio ratio, double R, double L,
                               std::uint32_t seed) {
  if (p < 2 || level < 0) throw Error(ErrorCode::InvalidArgument, "plate needs p >= 2");
  if (npatches != 2 && npatches != 3) throw Error(ErrorCode::InvalidArgument, "plate has 2 or 3 patches");
  if (!(R > 0.0) || !(L > 2.0 * R)) throw Error(ErrorCode::InvalidArgument, "plate needs 0 < 2R < L");
  const double w = std::cos(pi / 8);
  const double tq = std::tan(pi / 8);
  MultiPatchModel m;
  if (npatches == 2) {
    m.patches.push_back(ruled_patch(arc(R, 0, pi / 4), rational_line({L, 0}, {L, L * tq}, {L, L}, w), p,
                                    ratio.master, ratio.master));
    m.patches.push_back(ruled_patch(arc(R, pi / 4, pi / 2), rational_line({L, L}, {L * tq, L}, {0, L}, w), p,
                                    ratio.slave, ratio.slave));
    m.interfaces.push_back({0, Side::East, 1, Side::West, std::nullopt});
    if (!matched) {
      std::mt19937 rng(seed);
      const double len = L * std::sqrt(2.0) - R;
      perturb_side(m.patches[0], Side::East, 0.1 * len / ratio.master, rng);
      perturb_side(m.patches[1], Side::West, 0.1 * len / ratio.slave, rng);
    }
  } else {
    const Vec2 Q(0.4 * L, 0.4 * L);
    const Vec2 A1(L, 0.0), B1(0.0, L);
    m.patches.push_back(ruled_patch(arc(R, 0, pi / 4), rational_line(A1, 0.5 * (A1 + Q), Q, w), p, ratio.slave,
                                    ratio.slave));
    m.patches.push_back(ruled_patch(arc(R, pi / 4, pi / 2), rational_line(Q, 0.5 * (Q + B1), B1, w), p,
                                    ratio.slave, ratio.slave));
    m.patches.push_back(ruled_patch(line(Q, A1), line(B1, {L, L}), p, ratio.master, ratio.master));
    // patch 2 masters both of its interfaces; patch 0 masters patch 1
    m.interfaces.push_back({2, Side::South, 0, Side::North, std::nullopt});
    m.interfaces.push_back({0, Side::East, 1, Side::West, std::nullopt});
    m.interfaces.push_back({2, Side::West, 1, Side::North, std::nullopt});
    if (!matched) {
      std::mt19937 rng(seed);
      const double len = (Q - A1).norm();
      perturb_side(m.patches[0], Side::North, 0.1 * len / ratio.slave, rng);
      perturb_side(m.patches[2], Side::South, 0.1 * len / ratio.master, rng);
    }
  }
  for (auto& patch : m.patches) patch = patch.uniformly_refined(level);
  return m;
}

MultiPatchModel gen_fig4() {
  const int p = 2;
  auto greville_patch = [&](const KnotVector& ku, const KnotVector& kv, double y0, double y1) {
    auto greville = [](const KnotVector& k) {
      std::vector<double> g;
      for (int i = 0; i < k.num_basis(); ++i) {
        double s = 0.0;
        for (int j = 1; j <= k.degree(); ++j) s += k.values()[i + j];
        g.push_back(s / k.degree());
      }
      return g;
    };
    const auto gu = greville(ku), gv = greville(kv);
    std::vector<Vec2> pts;
    for (double v : gv)
      for (double u : gu) pts.emplace_back(u, y0 + v * (y1 - y0));
    return Patch2D(ku, kv, pts, {});
  };
  const KnotVector half({0, 0, 0, 0.5, 1, 1, 1}, p);
  const KnotVector thirds({0, 0, 0, 1.0 / 3, 2.0 / 3, 1, 1, 1}, p);
  MultiPatchModel m;
  m.patches.push_back(greville_patch(half, half, 1.0, 2.0));
  m.patches.push_back(greville_patch(thirds, half, 0.0, 1.0));
  m.interfaces.push_back({0, Side::South, 1, Side::North, std::nullopt});
  return m;
}

MultiPatchModel gen_largedef(int n, bool conforming, int p) {
  if (n < 1 || p < 1) throw Error(ErrorCode::InvalidArgument, "invalid large deformation mesh");
  MultiPatchModel m;
  m.patches.push_back(ruled_patch(line({0, 0}, {0.5, 0}), line({0, 1}, {0.5, 1}), p, n, n));
  m.patches.push_back(
      ruled_patch(line({0.5, 0}, {1, 0}), line({0.5, 1}, {1, 1}), p, n, conforming ? n : n + 1));
  m.interfaces.push_back({0, Side::East, 1, Side::West, std::nullopt});
  return m;
}

// ----------------------------------------------------------- exact solutions

PlateStress exact_plate_stress(double r, double theta, double Tx, double R) {
  if (r < R * (1.0 - 1e-12)) throw Error(ErrorCode::OutOfDomain, "point inside the hole");
  const double a2 = R * R / (r * r), a4 = a2 * a2;
  const double c2 = std::cos(2 * theta), s2 = std::sin(2 * theta);
  PlateStress s;
  s.rr = 0.5 * Tx * (1 - a2) + 0.5 * Tx * (1 - 4 * a2 + 3 * a4) * c2;
  s.tt = 0.5 * Tx * (1 + a2) - 0.5 * Tx * (1 + 3 * a4) * c2;
  s.rt = -0.5 * Tx * (1 + 2 * a2 - 3 * a4) * s2;
  const double c = std::cos(theta), sn = std::sin(theta);
  s.xx = s.rr * c * c + s.tt * sn * sn - 2 * s.rt * sn * c;
  s.yy = s.rr * sn * sn + s.tt * c * c + 2 * s.rt * sn * c;
  s.xy = (s.rr - s.tt) * sn * c + s.rt * (c * c - sn * sn);
  return s;
}

ManufacturedFields manufactured_fields(CaseId id) {
  switch (id) {
    case CaseId::SquareDirichlet:
    case CaseId::SquareMixed:
    case CaseId::Fig4:
      return {[](const Vec2& x) { return std::sin(pi * x[1]) * std::sinh(pi * x[0]); },
              [](const Vec2&) { return 0.0; },
              [](const Vec2& x) {
                return Vec2(pi * std::sin(pi * x[1]) * std::cosh(pi * x[0]),
                            pi * std::cos(pi * x[1]) * std::sinh(pi * x[0]));
              }};
    case CaseId::Annulus:
      return {[](const Vec2& x) { return std::sin(pi * x[0]) * std::sin(pi * x[1]); },
              [](const Vec2& x) { return 2 * pi * pi * std::sin(pi * x[0]) * std::sin(pi * x[1]); },
              [](const Vec2& x) {
                return Vec2(pi * std::cos(pi * x[0]) * std::sin(pi * x[1]),
                            pi * std::sin(pi * x[0]) * std::cos(pi * x[1]));
              }};
    default: break;
  }
  throw Error(ErrorCode::InvalidArgument, std::string("no manufactured solution for ") + to_string(id));
}

// ------------------------------------------------------------------ problems

namespace {

constexpr double kPlateTx = 10.0, kPlateR = 1.0, kPlateL = 4.0;

PlateStress plate_stress_at(const Vec2& x) {
  return exact_plate_stress(x.norm(), std::atan2(x[1], x[0]), kPlateTx, kPlateR);
}

// level-0 plate meshes use twice the ratio counts per direction
Ratio plate_counts(Ratio r) { return {2 * r.master, 2 * r.slave}; }

bool is_largedef(CaseId id) {
  return id == CaseId::LargeDef1 || id == CaseId::LargeDef2 || id == CaseId::LargeDef3;
}

}  // namespace

MultiPatchModel case_model(const BenchmarkCase& c, int level) {
  switch (c.id) {
    case CaseId::SquareDirichlet:
    case CaseId::SquareMixed: return gen_square_two_patch(c.ratio, c.matched, c.p, level, c.seed);
    case CaseId::Annulus: return gen_annulus_two_patch(c.ratio, c.p, level);
    case CaseId::PlateHole2:
      return gen_plate_hole(2, c.matched, c.p, level, plate_counts(c.ratio), kPlateR, kPlateL, c.seed);
    case CaseId::PlateHole3:
      return gen_plate_hole(3, c.matched, c.p, level, plate_counts(c.ratio), kPlateR, kPlateL, c.seed);
    case CaseId::Fig4: {
      auto m = gen_fig4();
      for (auto& patch : m.patches) patch = patch.uniformly_refined(level);
      return m;
    }
    case CaseId::LargeDef1:
    case CaseId::LargeDef2:
    case CaseId::LargeDef3: return gen_largedef(1 << level, false, c.p);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown case");
}

CaseSetup setup_case(const BenchmarkCase& c, int level) {
  if (is_largedef(c.id))
    throw Error(ErrorCode::InvalidArgument, "large deformation cases are solved by load stepping");
  CaseSetup s;
  s.spec = c;
  s.level = level;
  s.mesh = build_mortar_mesh(case_model(c, level), c.n);
  std::vector<DirichletCondition> dir;
  const bool plate = c.id == CaseId::PlateHole2 || c.id == CaseId::PlateHole3;
  if (!plate) {
    const auto mf = manufactured_fields(c.id);
    s.forcing = mf.f;
    auto value = [u = mf.u](const Vec2& x, int) { return u(x); };
    auto flux = [g = mf.grad](const Vec2& x, const Vec2& n) {
      Vector v(1);
      v[0] = g(x).dot(n);
      return v;
    };
    switch (c.id) {
      case CaseId::SquareMixed:
        dir = {{0, Side::West, -1, value}, {1, Side::East, -1, value}};
        for (int p = 0; p < 2; ++p)
          for (Side sd : {Side::South, Side::North}) s.loads.push_back({p, sd, flux, {}});
        break;
      case CaseId::SquareDirichlet:
        dir = {{0, Side::West, -1, value}, {0, Side::South, -1, value}, {0, Side::North, -1, value},
               {1, Side::East, -1, value}, {1, Side::South, -1, value}, {1, Side::North, -1, value}};
        break;
      case CaseId::Annulus:
        dir = {{0, Side::West, -1, value}, {1, Side::East, -1, value}};
        for (int p = 0; p < 2; ++p)
          for (Side sd : {Side::South, Side::North}) s.loads.push_back({p, sd, flux, {}});
        break;
      default:  // Fig4 geometry, full Dirichlet
        dir = {{0, Side::West, -1, value},  {0, Side::East, -1, value}, {0, Side::North, -1, value},
               {1, Side::West, -1, value},  {1, Side::East, -1, value}, {1, Side::South, -1, value}};
        break;
    }
    s.dirichlet = project_dirichlet(s.mesh, dir, 1);
    return s;
  }

  s.material = MaterialModel::linear_elastic(1e5, 0.3, false);
  s.ncomp = 2;
  auto zero = [](const Vec2&, int) { return 0.0; };
  dir = {{0, Side::West, 1, zero}};
  dir.push_back({1, Side::East, 0, zero});
  auto traction = [](const Vec2& x, const Vec2& n) {
    const auto st = plate_stress_at(x);
    Vector t(2);
    t << st.xx * n[0] + st.xy * n[1], st.xy * n[0] + st.yy * n[1];
    return t;
  };
  if (c.id == CaseId::PlateHole2) {
    s.loads = {{0, Side::North, traction, {}}, {1, Side::North, traction, {}}};
  } else {
    s.loads = {{2, Side::East, traction, {}}, {2, Side::North, traction, {}}};
  }
  s.dirichlet = project_dirichlet(s.mesh, dir, 2);
  if (c.id == CaseId::PlateHole3) {
    // the outer patch reaches both symmetry lines only at its corners, where
    // the neighbouring slave DOFs are dependent
    add_dirichlet_value(s.dirichlet, corner_dof(s.mesh, 2, Side::West, true) * 2 + 0, 0.0);
    add_dirichlet_value(s.dirichlet, corner_dof(s.mesh, 2, Side::South, true) * 2 + 1, 0.0);
  }
  return s;
}

AssembledSystem assemble_case(const CaseSetup& setup, Method method, WeakMultiPatchMesh* weak,
                              ExecutionPolicy policy) {
  auto assemble_on = [&](const Mesh& mesh) {
    AssembledSystem sys = setup.ncomp == 1
                              ? assemble_poisson(mesh, setup.forcing, policy)
                              : assemble_linear_elasticity(mesh, setup.material, nullptr, policy);
    add_boundary_loads(sys, mesh, setup.loads);
    return sys;
  };
  switch (method) {
    case Method::Mortar: return condense(assemble_on(setup.mesh.mesh), setup.mesh.constraint);
    case Method::Weak: {
      WeakMultiPatchMesh local;
      WeakMultiPatchMesh& wm = weak ? *weak : local;
      wm = build_weak_mesh(setup.mesh);
      return assemble_on(wm.mesh);
    }
    case Method::Saddle: return assemble_on(setup.mesh.mesh);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown method");
}

double case_error(const CaseSetup& setup, const SolutionField& field) {
  if (setup.ncomp == 2)
    return stress_l2_error(field, setup.material, 0, [](const Vec2& x) { return plate_stress_at(x).xx; });
  const auto u = manufactured_fields(setup.spec.id).u;
  return l2_error(field, [&](const Vec2& x) {
    Vector v(1);
    v[0] = u(x);
    return v;
  });
}

CaseSolution solve_case(const CaseSetup& setup, Method method) {
  const int nc = setup.ncomp;
  const Constraint& c = setup.mesh.constraint;
  CaseSolution out;
  if (method == Method::Saddle) {
    const AssembledSystem full = assemble_case(setup, method);
    const SaddleSystem saddle = assemble_saddle(full, setup.mesh);
    AssembledSystem sys;
    sys.K = saddle.A;
    sys.f = saddle.rhs;
    DirichletValues vals;
    for (auto [index, value] : setup.dirichlet)
      if (c.reduced_of_full[index / nc] >= 0) vals[index] = value;
    apply_dirichlet(sys, vals);
    const Vector z = linear_solve(sys.K, sys.f, false);
    out.dofs = sys.size();
    out.residual = (sys.K * z - sys.f).norm() / std::max(sys.f.norm(), 1e-300);
    out.field = SolutionField(setup.mesh.mesh, z.head(saddle.num_primal), nc);
  } else {
    WeakMultiPatchMesh wm;
    AssembledSystem sys = assemble_case(setup, method, &wm);
    apply_dirichlet(sys, reduce_dirichlet(setup.dirichlet, c, nc));
    const Vector x = linear_solve(sys);
    out.dofs = sys.size();
    out.residual = (sys.K * x - sys.f).norm() / std::max(sys.f.norm(), 1e-300);
    if (method == Method::Mortar)
      out.field = SolutionField(setup.mesh.mesh, expand_solution(c, x, nc), nc);
    else
      out.field = SolutionField(wm.mesh, x, nc);
  }
  out.error = case_error(setup, out.field);
  return out;
}

double ConvergenceReport::final_rate() const {
  if (rows.empty() || !rows.back().rate) return std::numeric_limits<double>::quiet_NaN();
  return *rows.back().rate;
}

void compute_rates(ConvergenceReport& report) {
  const ConvergenceRow* prev = nullptr;
  for (auto& row : report.rows) {
    row.rate.reset();
    if (row.status != "ok") {
      prev = nullptr;
      continue;
    }
    if (prev && prev->l2_error > 0.0 && row.l2_error > 0.0 && prev->h != row.h)
      row.rate = std::log(prev->l2_error / row.l2_error) / std::log(prev->h / row.h);
    prev = &row;
  }
}

ConvergenceReport run_convergence(const BenchmarkCase& c, Method method) {
  ConvergenceReport report;
  report.spec = c;
  double h0 = 1.0 / std::min(c.ratio.master, c.ratio.slave);
  if (c.id == CaseId::PlateHole2 || c.id == CaseId::PlateHole3) h0 *= 0.5;
  for (int level : c.levels) {
    ConvergenceRow row;
    row.level = level;
    row.h = h0 / (1 << level);
    try {
      const auto setup = setup_case(c, level);
      const auto sol = solve_case(setup, method);
      row.dofs = sol.dofs;
      row.l2_error = sol.error;
    } catch (const Error& e) {
      row.status = to_string(e.code());
      report.failed = true;
    }
    report.rows.push_back(row);
  }
  compute_rates(report);
  return report;
}

// ---------------------------------------------------------- large deformation

LargeDefSolution solve_large_deformation(CaseId id, int n, bool conforming, int p, int increments, double E,
                                         double nu, double pmax) {
  if (!is_largedef(id)) throw Error(ErrorCode::InvalidArgument, "not a large deformation case");
  const MortarMesh mm = build_mortar_mesh(gen_largedef(n, conforming, p), 1);
  auto pressure = [pmax](double lo, double hi, int coord) {
    return [=](const Vec2& x, const Vec2& nrm) {
      Vector t = Vector::Zero(2);
      if (x[coord] > lo && x[coord] < hi) t = -pmax * nrm;
      return t;
    };
  };
  auto zero = [](const Vec2&, int) { return 0.0; };
  std::vector<BoundaryLoad> loads;
  std::vector<DirichletCondition> dir;
  std::vector<std::pair<int, int>> points;  // (full dof, component)
  // parametric breaks: each patch spans half the square in x
  switch (id) {
    case CaseId::LargeDef1:
      loads = {{0, Side::North, pressure(0.25, 0.75, 0), {0.5}}, {1, Side::North, pressure(0.25, 0.75, 0), {0.5}}};
      dir = {{0, Side::South, 1, zero}, {1, Side::South, 1, zero}};
      points = {{corner_dof(mm, 0, Side::North, false), 0}, {corner_dof(mm, 1, Side::North, true), 0}};
      break;
    case CaseId::LargeDef2:
      loads = {{0, Side::North, pressure(0.0, 0.5, 0), {}}};
      dir = {{0, Side::South, 1, zero}, {1, Side::South, 1, zero}, {0, Side::West, 0, zero}};
      points = {{corner_dof(mm, 1, Side::North, true), 0}};
      break;
    default:
      loads = {{0, Side::West, pressure(0.25, 0.75, 1), {0.25, 0.75}}};
      dir = {{1, Side::East, 0, zero}};
      points = {{corner_dof(mm, 0, Side::West, false), 1}, {corner_dof(mm, 0, Side::West, true), 1}};
      break;
  }
  DirichletValues vals = project_dirichlet(mm, dir, 2);
  for (auto [dof, comp] : points) add_dirichlet_value(vals, dof * 2 + comp, 0.0);

  NonlinearProblem pb;
  pb.mesh = mm.mesh;
  pb.material = MaterialModel::neo_hookean(E, nu);
  pb.constraint = mm.constraint;
  for (auto [index, value] : reduce_dirichlet(vals, mm.constraint, 2)) pb.fixed.push_back(index);
  pb.f_ext = boundary_load_vector(mm.mesh, 2, loads);
  auto res = newton_load_stepping(pb, increments);
  return {SolutionField(mm.mesh, res.state, 2), res.iterations};
}

ConvergenceReport weak_vs_conforming_relative_error(CaseId id, const std::vector<int>& ns, int p, int increments,
                                                    double pmax) {
  ConvergenceReport report;
  report.spec.id = id;
  report.spec.p = p;
  report.spec.ratio = {1, 1};
  report.spec.n = 1;
  report.spec.levels.clear();
  for (size_t k = 0; k < ns.size(); ++k) {
    ConvergenceRow row;
    row.level = static_cast<int>(k);
    row.h = 1.0 / ns[k];
    report.spec.levels.push_back(row.level);
    try {
      const auto w = solve_large_deformation(id, ns[k], false, p, increments, 30e9, 0.48, pmax);
      const auto c = solve_large_deformation(id, ns[k], true, p, increments, 30e9, 0.48, pmax);
      row.dofs = w.field.mesh().num_dofs * 2;
      row.l2_error = l2_difference(w.field, c.field);
    } catch (const Error& e) {
      row.status = to_string(e.code());
      report.failed = true;
    }
    report.rows.push_back(row);
  }
  compute_rates(report);
  return report;
}

}  // namespace bdm
