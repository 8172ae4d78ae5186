#pragma once

#include <vector>

namespace bdm {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int n);

/// Rule mapped to [a, b]; weights include the Jacobian (b - a) / 2.
GaussRule gauss_legendre(int n, double a, double b);

}  // namespace bdm
