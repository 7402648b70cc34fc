#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "wvar/common.hpp"
#include "wvar/measure.hpp"
#include "wvar/quadrature.hpp"
#include "wvar/types.hpp"

namespace wvar {

// ---------------------------------------------------------------------------
// Slice reduction: for a function F(s) of s = xi . x alone,
//   int_Omega F(xi . x) dx = int F(s) rho(s) ds
// with rho the (d-1)-volume of the slice {xi . x = s} intersected with Omega.
// ---------------------------------------------------------------------------

/// Breakpoints of the slice density in s (the square's chord length is
/// piecewise linear with kinks at the corner projections).
inline std::vector<double> slice_breakpoints(const Domain& dom, const Vec& xi) {
  if (dom.is_ball()) return {-1.0, 1.0};
  std::vector<double> b;
  for (double sx : {-1.0, 1.0})
    for (double sy : {-1.0, 1.0}) b.push_back(xi(0) * sx + xi(1) * sy);
  std::sort(b.begin(), b.end());
  return b;
}

/// int_a^b F(s) rho(s) ds with F smooth on [a, b] and [a, b] free of density kinks.
template <class F>
double slice_piece(const Domain& dom, const Vec& xi, F&& f, double a, double b, int points) {
  if (b <= a) return 0.0;
  if (dom.is_ball()) {
    const int k = dom.dim - 1;
    return unit_ball_volume(k) * integrate_ball_slices(f, a, b, k, points);
  }
  return integrate_gl([&](double s) { return f(s) * square_chord_length(xi, s); }, a, b, points);
}

/// int F(s) rho(s) ds where F is smooth between the supplied breakpoints.
template <class F>
double slice_integral(const Domain& dom, const Vec& xi, F&& f, std::vector<double> breaks, int points) {
  const auto dens = slice_breakpoints(dom, xi);
  const double lo = dens.front(), hi = dens.back();
  breaks.insert(breaks.end(), dens.begin(), dens.end());
  std::vector<double> b;
  for (double x : breaks)
    if (x >= lo && x <= hi) b.push_back(x);
  std::sort(b.begin(), b.end());
  b.erase(std::unique(b.begin(), b.end()), b.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) total += slice_piece(dom, xi, f, b[i], b[i + 1], points);
  return total;
}

/// If every atom of f has direction +xi or -xi for a common xi, returns xi.
inline std::optional<Vec> common_axis(const AtomCombination& f) {
  if (f.empty()) return std::nullopt;
  const Vec& xi = f.terms().front().atom.direction;
  for (const auto& t : f.terms()) {
    const Vec& u = t.atom.direction;
    if ((u - xi).norm() > 1e-15 && (u + xi).norm() > 1e-15) return std::nullopt;
  }
  return xi;
}

/// Squared L2 norm of a combination whose atoms all share the axis xi.
inline double axis_sq_norm(const AtomCombination& f, const Vec& xi, const Domain& dom, int points) {
  std::vector<double> breaks;
  std::vector<std::pair<double, double>> lin;  // (sign, offset) in the variable s
  std::vector<double> coef;
  for (const auto& t : f.terms()) {
    const double sg = t.atom.direction.dot(xi) > 0.0 ? 1.0 : -1.0;
    lin.emplace_back(sg, t.atom.offset);
    coef.push_back(t.coef);
    breaks.push_back(sg * t.atom.offset);
  }
  auto val = [&](double s) {
    double v = 0.0;
    for (std::size_t i = 0; i < lin.size(); ++i) v += coef[i] * std::max(0.0, lin[i].first * s - lin[i].second);
    return v * v;
  };
  return slice_integral(dom, xi, val, breaks, points);
}

// ---------------------------------------------------------------------------
// Atom norms
// ---------------------------------------------------------------------------

/// ||(xi . x - t)_+||_{L2(Omega)}.
inline double atom_l2_norm(const Atom& atom, const Domain& dom, const QuadratureSpec& q = QuadratureSpec::slice()) {
  if (q.is_slice()) {
    const double t = atom.offset;
    const auto dens = slice_breakpoints(dom, atom.direction);
    if (t >= dens.back()) return 0.0;
    auto f = [t](double s) { return s > t ? (s - t) * (s - t) : 0.0; };
    return std::sqrt(slice_integral(dom, atom.direction, f, {t}, q.points));
  }
  const EmpiricalMeasure m = domain_measure(dom, q.samples, q.seed);
  return m.l2_norm(AtomCombination::single(atom).evaluate(m.points)).value;
}

// ---------------------------------------------------------------------------
// L2 distances
// ---------------------------------------------------------------------------

/// ||f - g||_{L2(Omega)} with a standard error (0 for deterministic quadrature).
/// Slice quadrature is used when q asks for it and all atoms share one axis;
/// otherwise seeded Monte Carlo on the domain.
inline IntegralEstimate l2_error_estimate(const AtomCombination& f, const AtomCombination& g, const Domain& dom,
                                          const QuadratureSpec& q) {
  const AtomCombination diff = f - g;
  IntegralEstimate out;
  if (diff.empty()) return out;
  if (q.is_slice()) {
    if (auto axis = common_axis(diff)) {
      out.value = std::sqrt(std::max(0.0, axis_sq_norm(diff, *axis, dom, q.points)));
      return out;
    }
  }
  const std::int64_t samples = q.is_slice() ? 100000 : q.samples;
  const EmpiricalMeasure m = domain_measure(dom, samples, q.seed);
  return m.l2_norm(diff.evaluate(m.points));
}

inline double l2_error(const AtomCombination& f, const AtomCombination& g, const Domain& dom,
                       const QuadratureSpec& q = QuadratureSpec::slice()) {
  return l2_error_estimate(f, g, dom, q).value;
}

/// Importance-sampled ||f - g|| when f - g is known to vanish outside the
/// union of `support` (intersected with the domain).
inline IntegralEstimate l2_error_on(const AtomCombination& f, const AtomCombination& g, const Domain& dom,
                                    const std::vector<Region>& support, std::int64_t samples, std::uint64_t seed) {
  const AtomCombination diff = f - g;
  if (diff.empty() || support.empty()) return {};
  const EmpiricalMeasure m = mixture_measure(dom, support, samples, seed);
  return m.l2_norm(diff.evaluate(m.points));
}

// ---------------------------------------------------------------------------
// Admissibility
// ---------------------------------------------------------------------------

struct AdmissibilityReport {
  double max_ratio = 0.0;
  Atom worst_atom;
  std::vector<Atom> flagged;  // w = 0 while ||phi|| > tolerance
  int atoms_checked = 0;
  bool admissible() const { return flagged.empty() && std::isfinite(max_ratio); }
};

/// Directions used by the admissibility scan: equally spaced angles for d = 2,
/// otherwise signed coordinate axes plus normalized (+-1, ..., +-1) diagonals.
inline std::vector<Vec> scan_directions(int d, int density) {
  std::vector<Vec> dirs;
  if (d == 2) {
    for (int i = 0; i < density; ++i) {
      const double a = 2.0 * kPi * i / density;
      dirs.push_back(vec2(std::cos(a), std::sin(a)));
    }
    return dirs;
  }
  for (int i = 0; i < d; ++i) {
    dirs.push_back(unit_vector(d, i, 1.0));
    dirs.push_back(unit_vector(d, i, -1.0));
  }
  const int corners = 1 << std::min(d, 10);
  for (int c = 0; c < corners; ++c) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v(i) = ((c >> (i % 10)) & 1) ? 1.0 : -1.0;
    dirs.push_back(v / v.norm());
  }
  return dirs;
}

/// Scans ||phi / w(phi)|| over a direction x offset grid of the active
/// parameter set: grid_density + 1 equally spaced offsets spanning the offset range.
inline AdmissibilityReport check_admissible(const WeightFn& wf, const Domain& dom, int grid_density,
                                            double tolerance = 1e-12) {
  require(grid_density >= 8, "check_admissible: grid_density must be >= 8");
  AdmissibilityReport rep;
  const QuadratureSpec q = QuadratureSpec::slice(256);
  for (const Vec& xi : scan_directions(dom.dim, grid_density)) {
    const auto [lo, hi] = dom.offset_range(xi);
    for (int j = 0; j <= grid_density; ++j) {
      const double t = lo + (hi - lo) * j / grid_density;
      const Atom a(xi, t);
      const double nrm = atom_l2_norm(a, dom, q);
      const double w = wf(a);
      ++rep.atoms_checked;
      if (w <= 0.0) {
        if (nrm > tolerance) rep.flagged.push_back(a);
        continue;
      }
      const double r = nrm / w;
      if (r > rep.max_ratio || rep.atoms_checked == 1) {
        rep.max_ratio = r;
        rep.worst_atom = a;
      }
    }
  }
  if (!rep.flagged.empty()) rep.max_ratio = std::numeric_limits<double>::infinity();
  return rep;
}

}  // namespace wvar
