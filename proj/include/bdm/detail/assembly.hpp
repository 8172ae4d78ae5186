#pragma once

#include <exception>
#include <vector>

#include "bdm/fem.hpp"

namespace bdm::detail {

struct Local {
  Matrix K;
  Vector f;
};

/// Element kernels run independently (in parallel when asked); the scatter to
/// the global matrix is serial in element order, so both policies produce
/// bitwise identical systems.
template <class Kernel>
AssembledSystem assemble(const Mesh& mesh, int ncomp, ExecutionPolicy policy, Kernel&& kernel) {
  const int ne = static_cast<int>(mesh.elements.size());
  std::vector<Local> locals(ne);
  if (policy == ExecutionPolicy::Parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4)
    for (int e = 0; e < ne; ++e) {
      try {
        locals[e] = kernel(mesh.elements[e]);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (int e = 0; e < ne; ++e) locals[e] = kernel(mesh.elements[e]);
  }

  AssembledSystem sys;
  sys.ncomp = ncomp;
  const int n = mesh.num_dofs * ncomp;
  sys.f = Vector::Zero(n);
  std::vector<Triplet> trip;
  size_t count = 0;
  for (const auto& l : locals) count += static_cast<size_t>(l.K.size());
  trip.reserve(count);
  for (int e = 0; e < ne; ++e) {
    const auto& dofs = mesh.elements[e].dofs;
    const auto& l = locals[e];
    const int nl = static_cast<int>(dofs.size()) * ncomp;
    for (int j = 0; j < nl; ++j) {
      const int gj = dofs[j / ncomp] * ncomp + j % ncomp;
      sys.f[gj] += l.f[j];
      for (int i = 0; i < nl; ++i) trip.emplace_back(dofs[i / ncomp] * ncomp + i % ncomp, gj, l.K(i, j));
    }
  }
  sys.K.resize(n, n);
  sys.K.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

}  // namespace bdm::detail
