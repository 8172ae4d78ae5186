// Serial vs OpenMP element assembly: timing and bitwise agreement.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include <omp.h>

#include "bdm/benchmarks.hpp"

using namespace bdm;

namespace {

double seconds(const std::function<void()>& f, int reps) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

double max_diff(const SparseMatrix& a, const SparseMatrix& b) {
  return SparseMatrix(a - b).coeffs().cwiseAbs().maxCoeff();
}

}  // namespace

int main(int argc, char** argv) {
  const int level = argc > 1 ? std::atoi(argv[1]) : 4;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 3;
  std::printf("threads %d, level %d\n", omp_get_max_threads(), level);
  std::printf("%-24s %10s %10s %8s %12s\n", "kernel", "serial[s]", "omp[s]", "speedup", "max|diff|");

  BenchmarkCase c;
  c.id = CaseId::SquareMixed;
  const auto sq = setup_case(c, level);
  const auto f = manufactured_fields(CaseId::SquareMixed).f;
  AssembledSystem ss, sp;
  const double ts = seconds([&] { ss = assemble_poisson(sq.mesh.mesh, f, ExecutionPolicy::Serial); }, reps);
  const double tp = seconds([&] { sp = assemble_poisson(sq.mesh.mesh, f, ExecutionPolicy::Parallel); }, reps);
  std::printf("%-24s %10.4f %10.4f %8.2f %12.3g\n", "poisson", ts, tp, ts / tp, max_diff(ss.K, sp.K));

  c.id = CaseId::PlateHole2;
  const auto pl = setup_case(c, std::max(0, level - 1));
  const double te = seconds([&] { ss = assemble_linear_elasticity(pl.mesh.mesh, pl.material, nullptr, ExecutionPolicy::Serial); }, reps);
  const double tq = seconds([&] { sp = assemble_linear_elasticity(pl.mesh.mesh, pl.material, nullptr, ExecutionPolicy::Parallel); }, reps);
  std::printf("%-24s %10.4f %10.4f %8.2f %12.3g\n", "linear elasticity", te, tq, te / tq, max_diff(ss.K, sp.K));

  const Mesh mesh = build_weak_mesh(gen_largedef(1 << level, false, 2), 1).mesh;
  const auto nh = MaterialModel::neo_hookean(30e9, 0.48);
  Vector state = Vector::Zero(2 * mesh.num_dofs);
  for (int i = 0; i < state.size(); ++i) state[i] = 1e-3 * std::sin(0.37 * i);
  const Vector fext = Vector::Zero(state.size());
  ResidualTangent rs, rp;
  const double tn = seconds([&] { rs = neo_hookean_step(mesh, nh, 1.0, state, fext, ExecutionPolicy::Serial); }, reps);
  const double to = seconds([&] { rp = neo_hookean_step(mesh, nh, 1.0, state, fext, ExecutionPolicy::Parallel); }, reps);
  const double dr = (rs.residual - rp.residual).cwiseAbs().maxCoeff();
  std::printf("%-24s %10.4f %10.4f %8.2f %12.3g\n", "neo-hookean tangent", tn, to, tn / to,
              std::max(dr, max_diff(rs.tangent, rp.tangent)));
  return 0;
}
