#include "bdm/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "bdm/error.hpp"

namespace bdm {

namespace {

GaussRule compute_rule(int n) {
  GaussRule r;
  r.points.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.points[i] = -x;
    r.points[n - 1 - i] = x;
    r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "quadrature needs at least one point");
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
  return it->second;
}

GaussRule gauss_legendre(int n, double a, double b) {
  GaussRule r = gauss_legendre(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    r.points[i] = mid + half * r.points[i];
    r.weights[i] *= half;
  }
  return r;
}

}  // namespace bdm
