#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wvar/common.hpp"

namespace wvar {

// ---------------------------------------------------------------------------
// Domain
// ---------------------------------------------------------------------------

enum class DomainKind { Ball, Square };

struct Domain {
  DomainKind kind = DomainKind::Ball;
  int dim = 2;

  static Domain ball(int d) {
    require(d >= 2, "Domain: dim must be >= 2");
    return {DomainKind::Ball, d};
  }
  static Domain square() { return {DomainKind::Square, 2}; }

  bool is_ball() const { return kind == DomainKind::Ball; }

  double volume() const {
    if (kind == DomainKind::Square) return 4.0;
    return std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
  }

  bool contains(const Vec& x) const {
    if (kind == DomainKind::Square) return std::abs(x(0)) <= 1.0 && std::abs(x(1)) <= 1.0;
    return x.squaredNorm() <= 1.0;
  }

  /// Range of offsets t for which the hyperplane xi.x = t meets the domain.
  std::pair<double, double> offset_range(const Vec& xi) const {
    if (kind == DomainKind::Ball) return {-1.0, 1.0};
    const double r = xi.cwiseAbs().sum();
    return {-r, r};
  }

  std::string name() const { return kind == DomainKind::Ball ? "ball" : "square"; }
};

// ---------------------------------------------------------------------------
// Atom: x -> (xi . x - t)_+
// ---------------------------------------------------------------------------

struct Atom {
  Vec direction;
  double offset = 0.0;

  Atom() = default;
  Atom(Vec xi, double t) : direction(std::move(xi)), offset(t) {
    require(direction.size() >= 1, "Atom: empty direction");
    require(std::abs(direction.norm() - 1.0) <= 1e-12, "Atom: direction must be a unit vector");
  }

  /// Normalizes xi; the offset is taken as given.
  static Atom normalized(const Vec& xi, double t) {
    const double n = xi.norm();
    require(n > 0.0, "Atom: zero direction");
    return Atom(xi / n, t);
  }

  int dim() const { return static_cast<int>(direction.size()); }

  template <class D>
  double affine(const Eigen::MatrixBase<D>& x) const {
    return direction.dot(x) - offset;
  }
  template <class D>
  double operator()(const Eigen::MatrixBase<D>& x) const {
    return std::max(0.0, affine(x));
  }

  /// Exact equality of the stored values (used to merge dictionary atoms).
  bool same_as(const Atom& o) const {
    return offset == o.offset && direction.size() == o.direction.size() && direction == o.direction;
  }
};

inline double atom_eval(const Atom& atom, const Vec& x) { return atom(x); }

// ---------------------------------------------------------------------------
// AtomCombination: finite sum of coefficient * atom
// ---------------------------------------------------------------------------

struct Term {
  Atom atom;
  double coef = 0.0;
};

class AtomCombination {
 public:
  AtomCombination() = default;
  explicit AtomCombination(std::vector<Term> terms) : terms_(std::move(terms)) {}

  static AtomCombination single(const Atom& a, double c = 1.0) { return AtomCombination({{a, c}}); }

  void add(const Atom& a, double c) { terms_.push_back({a, c}); }
  void append(const AtomCombination& o, double scale = 1.0) {
    for (const auto& t : o.terms_) terms_.push_back({t.atom, scale * t.coef});
  }

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  template <class D>
  double operator()(const Eigen::MatrixBase<D>& x) const {
    double s = 0.0;
    for (const auto& t : terms_) s += t.coef * t.atom(x);
    return s;
  }

  /// Values at the columns of `points` (dim x N).
  Vec evaluate(const Mat& points) const {
    Vec out = Vec::Zero(points.cols());
    for (const auto& t : terms_) {
      if (t.coef == 0.0) continue;
      Eigen::ArrayXd z = (t.atom.direction.transpose() * points).transpose().array() - t.atom.offset;
      out.array() += t.coef * z.max(0.0);
    }
    return out;
  }

  AtomCombination scaled(double s) const {
    AtomCombination r;
    r.append(*this, s);
    return r;
  }

  AtomCombination operator-(const AtomCombination& o) const {
    AtomCombination r = *this;
    r.append(o, -1.0);
    return r;
  }
  AtomCombination operator+(const AtomCombination& o) const {
    AtomCombination r = *this;
    r.append(o, 1.0);
    return r;
  }

  /// Sums coefficients of bitwise-identical atoms and drops exact zeros.
  AtomCombination merged() const {
    std::map<std::vector<double>, std::pair<Atom, double>> acc;
    std::vector<std::vector<double>> order;
    for (const auto& t : terms_) {
      std::vector<double> key(t.atom.direction.data(), t.atom.direction.data() + t.atom.direction.size());
      key.push_back(t.atom.offset);
      auto it = acc.find(key);
      if (it == acc.end()) {
        acc.emplace(key, std::make_pair(t.atom, t.coef));
        order.push_back(std::move(key));
      } else {
        it->second.second += t.coef;
      }
    }
    AtomCombination r;
    for (const auto& k : order) {
      const auto& [a, c] = acc.at(k);
      if (c != 0.0) r.add(a, c);
    }
    return r;
  }

  double l1_mass() const {
    double s = 0.0;
    for (const auto& t : terms_) s += std::abs(t.coef);
    return s;
  }

 private:
  std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// Weight functions
// ---------------------------------------------------------------------------

enum class WeightKind { BallPower, SquareChordSqrt, Unweighted, Custom };

/// Segment {x in [-1,1]^2 : xi . x = s}; returns endpoints if non-empty.
inline std::optional<std::pair<Vec, Vec>> square_chord(const Vec& xi, double s) {
  const Vec perp = vec2(-xi(1), xi(0));
  const Vec base = s * xi;
  double lo = -1e300, hi = 1e300;
  for (int c = 0; c < 2; ++c) {
    if (std::abs(perp(c)) < 1e-300) {
      if (std::abs(base(c)) > 1.0) return std::nullopt;
      continue;
    }
    double a = (-1.0 - base(c)) / perp(c), b = (1.0 - base(c)) / perp(c);
    if (a > b) std::swap(a, b);
    lo = std::max(lo, a);
    hi = std::min(hi, b);
  }
  if (hi < lo) return std::nullopt;
  return std::make_pair(Vec(base + lo * perp), Vec(base + hi * perp));
}

inline double square_chord_length(const Vec& xi, double s) {
  auto seg = square_chord(xi, s);
  if (!seg) return 0.0;
  return (seg->second - seg->first).norm();
}

struct WeightFn {
  WeightKind kind = WeightKind::Unweighted;
  int dim = 2;
  /// Custom weights: (t, w) nodes, interpolated linearly in t, clamped outside.
  std::vector<std::pair<double, double>> table;

  static WeightFn ball_power(int d) { return {WeightKind::BallPower, d, {}}; }
  static WeightFn square_chord_sqrt() { return {WeightKind::SquareChordSqrt, 2, {}}; }
  static WeightFn unweighted(int d = 2) { return {WeightKind::Unweighted, d, {}}; }
  static WeightFn custom(std::vector<std::pair<double, double>> nodes, int d = 2) {
    require(!nodes.empty(), "WeightFn: empty custom table");
    std::sort(nodes.begin(), nodes.end());
    for (const auto& [t, w] : nodes) require(w >= 0.0, "WeightFn: custom weights must be nonnegative");
    return {WeightKind::Custom, d, std::move(nodes)};
  }

  /// Exponent of (1 - t) in the ball weight.
  double ball_exponent() const { return 0.5 + 0.25 * dim; }

  double operator()(const Vec& xi, double t) const {
    switch (kind) {
      case WeightKind::BallPower:
        return std::pow(std::max(0.0, 1.0 - t), ball_exponent());
      case WeightKind::SquareChordSqrt:
        return std::sqrt(square_chord_length(xi, t));
      case WeightKind::Unweighted:
        return 1.0;
      case WeightKind::Custom: {
        if (t <= table.front().first) return table.front().second;
        if (t >= table.back().first) return table.back().second;
        auto it = std::upper_bound(table.begin(), table.end(), std::make_pair(t, -1e300),
                                   [](const auto& a, const auto& b) { return a.first < b.first; });
        const auto& [t1, w1] = *it;
        const auto& [t0, w0] = *(it - 1);
        return w0 + (w1 - w0) * (t - t0) / (t1 - t0);
      }
    }
    return 1.0;
  }

  double operator()(const Atom& a) const { return (*this)(a.direction, a.offset); }

  std::string name() const {
    switch (kind) {
      case WeightKind::BallPower: return "ball-power";
      case WeightKind::SquareChordSqrt: return "square-chord";
      case WeightKind::Unweighted: return "unweighted";
      case WeightKind::Custom: return "custom";
    }
    return "?";
  }
};

inline double weight(const WeightFn& wf, const Atom& atom) { return wf(atom); }

inline double vw_cost(const AtomCombination& f, const WeightFn& wf) {
  double s = 0.0;
  for (const auto& t : f.terms()) s += wf(t.atom) * std::abs(t.coef);
  return s;
}

// ---------------------------------------------------------------------------
// Quadrature descriptor
// ---------------------------------------------------------------------------

enum class QuadMethod { SliceQuad, MonteCarlo };

struct QuadratureSpec {
  QuadMethod method = QuadMethod::SliceQuad;
  int points = 256;
  std::int64_t samples = 100000;
  std::uint64_t seed = 0;

  static QuadratureSpec slice(int points = 256) {
    require(points >= 16, "QuadratureSpec: slice quadrature needs >= 16 points");
    QuadratureSpec q;
    q.method = QuadMethod::SliceQuad;
    q.points = points;
    return q;
  }
  static QuadratureSpec monte_carlo(std::int64_t samples = 100000, std::uint64_t seed = 0) {
    require(samples >= 1000, "QuadratureSpec: Monte Carlo needs >= 1000 samples");
    QuadratureSpec q;
    q.method = QuadMethod::MonteCarlo;
    q.samples = samples;
    q.seed = seed;
    return q;
  }
  bool is_slice() const { return method == QuadMethod::SliceQuad; }
};

}  // namespace wvar
