#pragma once

#include <random>
#include <vector>

#include "bdm/spline.hpp"

namespace bdm::test {

/// Open knot vector on [0, 1] with random interior knots (some repeated).
inline KnotVector random_knots(int p, int interior, std::mt19937& rng, bool allow_repeats = true) {
  std::uniform_real_distribution<double> u(0.02, 0.98);
  std::vector<double> inner;
  while (static_cast<int>(inner.size()) < interior) {
    const double x = u(rng);
    bool far = true;
    for (double y : inner) far = far && std::abs(x - y) > 0.02;
    if (!far) continue;
    inner.push_back(x);
    if (allow_repeats && p > 1 && rng() % 4 == 0 && static_cast<int>(inner.size()) < interior) inner.push_back(x);
  }
  std::sort(inner.begin(), inner.end());
  std::vector<double> v(p + 1, 0.0);
  v.insert(v.end(), inner.begin(), inner.end());
  v.insert(v.end(), p + 1, 1.0);
  return KnotVector(v, p);
}

inline double max_abs(const Matrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace bdm::test
