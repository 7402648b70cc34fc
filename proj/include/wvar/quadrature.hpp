#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "wvar/common.hpp"

namespace wvar {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points (Newton iteration on P_n).
inline GaussRule gauss_legendre_compute(int n) {
  require(n >= 2, "gauss_legendre: need at least 2 points");
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
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
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

/// Cached rule; safe to call from several threads.
inline const GaussRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre_compute(n)).first;
  return it->second;
}

template <class F>
double integrate_gl(F&& f, double a, double b, int points) {
  if (b <= a) return 0.0;
  const GaussRule& r = gauss_legendre(points);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

/// Integral over [a, b] of f(s) * (1 - s^2)^{(k)/2} using s = cos(theta), which
/// removes the endpoint singularity at s = +-1. Requires -1 <= a <= b <= 1.
template <class F>
double integrate_ball_slices(F&& f, double a, double b, int k, int points) {
  a = std::clamp(a, -1.0, 1.0);
  b = std::clamp(b, -1.0, 1.0);
  if (b <= a) return 0.0;
  const double th_lo = std::acos(b), th_hi = std::acos(a);
  return integrate_gl(
      [&](double th) {
        const double s = std::cos(th), sn = std::sin(th);
        return f(s) * std::pow(sn, k + 1);
      },
      th_lo, th_hi, points);
}

/// Volume of the unit ball in R^k.
inline double unit_ball_volume(int k) {
  return std::pow(kPi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

}  // namespace wvar
