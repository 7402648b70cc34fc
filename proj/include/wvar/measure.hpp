#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include <Eigen/Sparse>

#include "wvar/common.hpp"
#include "wvar/quadrature.hpp"
#include "wvar/rng.hpp"
#include "wvar/types.hpp"

namespace wvar {

/// Uniform point in the ball of radius r in R^d: rejection from the cube for
/// d <= 4, direction x radius^(1/d) otherwise.
inline Vec sample_ball(int d, Rng& rng, double r = 1.0) {
  Vec x(d);
  if (d <= 4) {
    while (true) {
      for (int i = 0; i < d; ++i) x(i) = uniform(rng, -1.0, 1.0);
      if (x.squaredNorm() <= 1.0) break;
    }
    return r * x;
  }
  for (int i = 0; i < d; ++i) x(i) = standard_normal(rng);
  const double rad = std::pow(uniform01(rng), 1.0 / d);
  return (r * rad / x.norm()) * x;
}

/// Orthonormal basis of the complement of a unit vector (d x (d-1)).
inline Mat orthogonal_complement(const Vec& u) {
  const int d = static_cast<int>(u.size());
  Eigen::HouseholderQR<Mat> qr(u);
  Mat q = qr.householderQ() * Mat::Identity(d, d);
  return q.rightCols(d - 1);
}

// ---------------------------------------------------------------------------
// Regions: sets that can be sampled uniformly and tested for membership.
// ---------------------------------------------------------------------------

enum class RegionKind { BallSlab, Box };

struct Region {
  RegionKind kind = RegionKind::Box;
  // BallSlab: {x in B^d : lo <= dir . x <= hi}
  Vec dir;
  double lo = -1.0, hi = 1.0;
  Mat complement;  // d x (d-1)
  // Box: center + axes * diag(half) * [-1,1]^d, axes orthonormal columns
  Vec center;
  Mat axes;
  Vec half;
  double vol = 0.0;

  static Region ball_slab(const Vec& dir, double lo, double hi) {
    Region r;
    r.kind = RegionKind::BallSlab;
    r.dir = dir;
    r.lo = std::clamp(lo, -1.0, 1.0);
    r.hi = std::clamp(hi, -1.0, 1.0);
    if (r.hi < r.lo) r.hi = r.lo;
    r.complement = orthogonal_complement(dir);
    const int d = static_cast<int>(dir.size());
    r.vol = unit_ball_volume(d - 1) * integrate_ball_slices([](double) { return 1.0; }, r.lo, r.hi, d - 1, 64);
    return r;
  }

  static Region whole_ball(int d) { return ball_slab(unit_vector(d, 0), -1.0, 1.0); }

  static Region box(const Vec& center, const Mat& axes, const Vec& half) {
    Region r;
    r.kind = RegionKind::Box;
    r.center = center;
    r.axes = axes;
    r.half = half;
    r.vol = (2.0 * half.array()).prod();
    return r;
  }

  static Region whole_square() { return box(Vec::Zero(2), Mat::Identity(2, 2), Vec::Ones(2)); }

  static Region whole(const Domain& dom) {
    return dom.is_ball() ? whole_ball(dom.dim) : whole_square();
  }

  double volume() const { return vol; }

  template <class D>
  bool contains(const Eigen::MatrixBase<D>& x) const {
    if (kind == RegionKind::BallSlab) {
      const double s = dir.dot(x);
      return s >= lo && s <= hi && x.squaredNorm() <= 1.0;
    }
    const Eigen::Index d = center.size();
    for (Eigen::Index a = 0; a < d; ++a) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) s += axes(i, a) * (x(i) - center(i));
      if (std::abs(s) > half(a)) return false;
    }
    return true;
  }

  Vec sample(Rng& rng) const {
    const int d = kind == RegionKind::BallSlab ? static_cast<int>(dir.size()) : static_cast<int>(center.size());
    if (kind == RegionKind::Box) {
      Vec local(d);
      for (int i = 0; i < d; ++i) local(i) = uniform(rng, -half(i), half(i));
      return center + axes * local;
    }
    // Slice coordinate s has density proportional to (1 - s^2)^{(d-1)/2}.
    const double k = 0.5 * (d - 1);
    const double smax = (lo <= 0.0 && hi >= 0.0) ? 0.0 : (hi < 0.0 ? hi : lo);
    const double pmax = std::pow(std::max(0.0, 1.0 - smax * smax), k);
    double s = lo;
    if (hi > lo && pmax > 0.0) {
      while (true) {
        s = uniform(rng, lo, hi);
        if (uniform01(rng) * pmax <= std::pow(std::max(0.0, 1.0 - s * s), k)) break;
      }
    }
    const double radius = std::sqrt(std::max(0.0, 1.0 - s * s));
    Vec eta = sample_ball(d - 1, rng, radius);
    return s * dir + complement * eta;
  }
};

// ---------------------------------------------------------------------------
// Empirical measures: integral of F over the domain ~ sum_i weights_i F(x_i)
// ---------------------------------------------------------------------------

struct IntegralEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

struct EmpiricalMeasure {
  Mat points;   // d x N
  Vec weights;  // N

  std::int64_t size() const { return points.cols(); }

  IntegralEstimate integrate(const Vec& values) const {
    const double n = static_cast<double>(values.size());
    IntegralEstimate est;
    est.value = weights.dot(values);
    if (values.size() > 1) {
      const Eigen::ArrayXd contrib = n * (weights.array() * values.array());
      const double mean = contrib.mean();
      const double var = (contrib - mean).square().sum() / (n - 1.0);
      est.stderr_ = std::sqrt(var / n);
    }
    return est;
  }

  /// L2 norm of a function given by its values, with a delta-method stderr.
  IntegralEstimate l2_norm(const Vec& values) const {
    IntegralEstimate sq = integrate(values.array().square().matrix());
    IntegralEstimate out;
    out.value = std::sqrt(std::max(0.0, sq.value));
    out.stderr_ = out.value > 0.0 ? sq.stderr_ / (2.0 * out.value) : 0.0;
    return out;
  }
};

inline EmpiricalMeasure domain_measure(const Domain& dom, std::int64_t samples, std::uint64_t seed) {
  require(samples >= 1, "domain_measure: need samples");
  Rng rng(seed);
  EmpiricalMeasure m;
  m.points.resize(dom.dim, samples);
  for (std::int64_t i = 0; i < samples; ++i) {
    if (dom.is_ball()) {
      m.points.col(i) = sample_ball(dom.dim, rng);
    } else {
      m.points(0, i) = uniform(rng, -1.0, 1.0);
      m.points(1, i) = uniform(rng, -1.0, 1.0);
    }
  }
  m.weights = Vec::Constant(samples, dom.volume() / static_cast<double>(samples));
  return m;
}

/// Importance measure for integrands supported on the union of `regions`
/// (intersected with the domain). Regions are chosen with probability
/// proportional to volume; weights are V_total / (N * #regions containing x).
inline EmpiricalMeasure mixture_measure(const Domain& dom, const std::vector<Region>& regions,
                                        std::int64_t samples, std::uint64_t seed) {
  require(samples >= 1, "mixture_measure: need samples");
  EmpiricalMeasure m;
  m.points.resize(dom.dim, samples);
  m.weights = Vec::Zero(samples);
  std::vector<double> cum;
  double total = 0.0;
  for (const auto& r : regions) {
    total += r.volume();
    cum.push_back(total);
  }
  if (regions.empty() || total <= 0.0) {
    m.points.setZero();
    return m;
  }
  Rng rng(seed);
  for (std::int64_t i = 0; i < samples; ++i) {
    const double u = uniform01(rng) * total;
    std::size_t k = std::upper_bound(cum.begin(), cum.end(), u) - cum.begin();
    if (k >= regions.size()) k = regions.size() - 1;
    const Vec x = regions[k].sample(rng);
    m.points.col(i) = x;
    if (!dom.contains(x)) continue;
    int count = 0;
    for (const auto& r : regions) count += r.contains(x) ? 1 : 0;
    m.weights(i) = total / (static_cast<double>(samples) * std::max(count, 1));
  }
  return m;
}

/// Sparse evaluation of several functions on a measure. Column j holds the
/// values of elements[j]; when supports are given, element j is treated as
/// zero outside the union of supports[j] (it must vanish there up to rounding).
inline Eigen::SparseMatrix<double> evaluate_elements(const std::vector<AtomCombination>& elements,
                                                     const std::vector<std::vector<Region>>* supports,
                                                     const EmpiricalMeasure& m) {
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> trips;
  const std::int64_t n = m.size();
  for (std::size_t j = 0; j < elements.size(); ++j) {
    const Vec col = elements[j].evaluate(m.points);
    for (std::int64_t i = 0; i < n; ++i) {
      if (col(i) == 0.0 || m.weights(i) == 0.0) continue;
      if (supports != nullptr) {
        bool inside = false;
        for (const auto& r : (*supports)[j]) {
          if (r.contains(m.points.col(i))) {
            inside = true;
            break;
          }
        }
        if (!inside) continue;
      }
      trips.emplace_back(static_cast<int>(i), static_cast<int>(j), col(i));
    }
  }
  Eigen::SparseMatrix<double> e(static_cast<int>(n), static_cast<int>(elements.size()));
  e.setFromTriplets(trips.begin(), trips.end());
  return e;
}

}  // namespace wvar
