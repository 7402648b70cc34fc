#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "wvar/common.hpp"
#include "wvar/discretization.hpp"
#include "wvar/geometry.hpp"
#include "wvar/measure.hpp"
#include "wvar/types.hpp"

namespace wvar {

// ---------------------------------------------------------------------------
// Boundary grids: m points equally spaced by arc length along the boundary of
// the disk or the square, starting at (1, 0) and running counterclockwise.
// ---------------------------------------------------------------------------

class BoundaryGrid {
 public:
  BoundaryGrid(const Domain& dom, int m) : dom_(dom), m_(m) {
    require(dom.dim == 2, "BoundaryGrid: planar domains only");
    require(m >= 4 && m % 2 == 0, "BoundaryGrid: m must be even and >= 4");
    perimeter_ = dom.is_ball() ? 2.0 * kPi : 8.0;
    if (dom.is_ball()) {
      pts_ = planar_boundary_points(m);
    } else {
      for (int j = 0; j < m; ++j) pts_.push_back(point_at(perimeter_ * j / m));
    }
  }

  const Domain& domain() const { return dom_; }
  int m() const { return m_; }
  double spacing() const { return perimeter_ / m_; }
  const Vec& point(int j) const { return pts_[static_cast<std::size_t>(wrap(j))]; }
  int wrap(int j) const { return ((j % m_) + m_) % m_; }

  /// Boundary point at arc-length parameter s.
  Vec point_at(double s) const {
    s = std::fmod(std::fmod(s, perimeter_) + perimeter_, perimeter_);
    if (dom_.is_ball()) return vec2(std::cos(s), std::sin(s));
    if (s < 1.0) return vec2(1.0, s);
    if (s < 3.0) return vec2(1.0 - (s - 1.0), 1.0);
    if (s < 5.0) return vec2(-1.0, 1.0 - (s - 3.0));
    if (s < 7.0) return vec2(-1.0 + (s - 5.0), -1.0);
    return vec2(1.0, -1.0 + (s - 7.0));
  }

  /// Arc-length parameter in [0, perimeter) of a boundary point.
  double param(const Vec& x) const {
    if (dom_.is_ball()) {
      double a = std::atan2(x(1), x(0));
      if (a < 0.0) a += 2.0 * kPi;
      return a;
    }
    const double px = x(0), py = x(1);
    const double ax = std::abs(px), ay = std::abs(py);
    double s;
    if (ax >= ay) {
      s = px > 0 ? (py >= 0 ? py : 8.0 + py) : 3.0 + (1.0 - py);
    } else {
      s = py > 0 ? 1.0 + (1.0 - px) : 5.0 + (px + 1.0);
    }
    if (s >= 8.0) s -= 8.0;
    return s;
  }

  /// Index i of the half-open arc [s_i, s_{i+1}) containing x, snapping
  /// parameters within 1e-12 of a grid parameter onto it.
  int arc_index(const Vec& x) const {
    const double s = param(x);
    const double r = s / spacing();
    const double nearest = std::round(r);
    if (std::abs(s - nearest * spacing()) <= 1e-12) return wrap(static_cast<int>(nearest));
    return wrap(static_cast<int>(std::floor(r)));
  }

  /// Corners of the square strictly inside arc i (empty for the disk).
  std::vector<Vec> interior_corners(int i) const {
    std::vector<Vec> out;
    if (dom_.is_ball()) return out;
    const double a = spacing() * wrap(i), b = a + spacing();
    for (double c : {1.0, 3.0, 5.0, 7.0})
      for (double cc : {c, c + 8.0})
        if (cc > a && cc < b) out.push_back(point_at(cc));
    return out;
  }

  /// Maximal distance of an arc from its chord (the sagitta); 0 on the square
  /// except through corners, which are handled via interior_corners.
  double sagitta() const { return dom_.is_ball() ? 1.0 - std::cos(kPi / m_) : 0.0; }

  /// Grid chord atom through points a and b, oriented by `sign`. Built from
  /// the sorted index pair so identical chords are bitwise identical.
  Atom chord_atom(int a, int b, double sign) const {
    int lo = wrap(a), hi = wrap(b);
    if (lo > hi) std::swap(lo, hi);
    require(lo != hi, "chord_atom: endpoints coincide");
    const Vec& p = pts_[static_cast<std::size_t>(lo)];
    const Vec& q = pts_[static_cast<std::size_t>(hi)];
    Vec nrm = vec2(-(q(1) - p(1)), q(0) - p(0));
    nrm /= nrm.norm();
    const double tau = nrm.dot(p);
    if (sign < 0.0) return Atom(-nrm, -tau);
    return Atom(nrm, tau);
  }

 private:
  Domain dom_;
  int m_;
  double perimeter_;
  std::vector<Vec> pts_;
};

// ---------------------------------------------------------------------------
// Strips
// ---------------------------------------------------------------------------

/// Endpoints of L_phi = H_phi intersected with the domain.
inline std::pair<Vec, Vec> chord_endpoints(const Atom& atom, const Domain& dom) {
  require(dom.dim == 2 && atom.dim() == 2, "chord_endpoints: planar atoms only");
  if (dom.is_ball()) {
    const double t = atom.offset;
    if (!(std::abs(t) < 1.0)) throw InvalidArgument("inactive atom: chord misses the open disk");
    const Vec c = t * atom.direction;
    const Vec p = vec2(-atom.direction(1), atom.direction(0));
    const double h = std::sqrt(1.0 - t * t);
    return {c + h * p, c - h * p};
  }
  auto seg = square_chord(atom.direction, atom.offset);
  if (!seg || (seg->second - seg->first).norm() <= 0.0)
    throw InvalidArgument("inactive atom: chord misses the open square");
  return *seg;
}

struct StripAssignment {
  int m = 0;
  int i = 0;    // arc of endpoint a
  int j = 0;    // arc of endpoint b; (j - i) mod m <= m / 2
  int gap = 0;  // (j - i) mod m
  Vec a, b;     // chord endpoints
  Vec P0, P1, Q0, Q1;
  int dist() const { return std::min(gap, m - gap); }
};

inline StripAssignment locate_strip(const Atom& atom, const BoundaryGrid& grid) {
  auto [e1, e2] = chord_endpoints(atom, grid.domain());
  const int m = grid.m();
  int i1 = grid.arc_index(e1), i2 = grid.arc_index(e2);
  int g = grid.wrap(i2 - i1);
  StripAssignment s;
  s.m = m;
  if (g > m / 2) {
    std::swap(i1, i2);
    std::swap(e1, e2);
    g = m - g;
  }
  s.i = i1;
  s.j = i2;
  s.gap = g;
  s.a = e1;
  s.b = e2;
  s.P0 = grid.point(i1);
  s.P1 = grid.point(i1 + 1);
  s.Q0 = grid.point(i2);
  s.Q1 = grid.point(i2 + 1);
  return s;
}

inline StripAssignment locate_strip(const Atom& atom, int m) {
  return locate_strip(atom, BoundaryGrid(Domain::ball(2), m));
}

namespace detail {
inline double angle_of(const Vec& v) { return std::atan2(v(1), v(0)); }
inline double ccw_len(double from, double to) {
  double d = std::fmod(to - from, 2.0 * kPi);
  if (d < 0.0) d += 2.0 * kPi;
  return d;
}
}  // namespace detail

/// True iff x lies on a segment joining arc [P0, P1] to arc [Q0, Q1].
/// Seen from x, a boundary point moving counterclockwise sweeps a monotone
/// angle, so x is on such a segment iff the angle interval of the first arc
/// meets the antipodal angle interval of the second.
inline bool strip_contains(const StripAssignment& s, const Vec& x, double tol = 1e-13) {
  if (s.gap == 0) {
    // Both endpoints on one arc: the strip is the cap cut off by the arc's chord.
    const Vec d = s.P1 - s.P0;
    const Vec nrm = vec2(d(1), -d(0));  // outward for a counterclockwise arc
    return nrm.dot(x - s.P0) >= -tol * nrm.norm();
  }
  const double a0 = detail::angle_of(s.P0 - x), a1 = detail::angle_of(s.P1 - x);
  const double b0 = detail::angle_of(x - s.Q0), b1 = detail::angle_of(x - s.Q1);
  const double la = detail::ccw_len(a0, a1), lb = detail::ccw_len(b0, b1);
  return detail::ccw_len(a0, b0) <= la + tol || detail::ccw_len(b0, a0) <= lb + tol;
}

// ---------------------------------------------------------------------------
// Regions used for importance sampling of planar errors
// ---------------------------------------------------------------------------

/// Box in the frame (u, u_perp) bounding `pts`, padded by `pad` on all sides.
inline Region hull_region(const Vec& u, const std::vector<Vec>& pts, double pad) {
  const Vec p = vec2(-u(1), u(0));
  double s0 = 1e300, s1 = -1e300, r0 = 1e300, r1 = -1e300;
  for (const Vec& x : pts) {
    s0 = std::min(s0, u.dot(x));
    s1 = std::max(s1, u.dot(x));
    r0 = std::min(r0, p.dot(x));
    r1 = std::max(r1, p.dot(x));
  }
  s0 -= pad;
  s1 += pad;
  r0 -= pad;
  r1 += pad;
  Mat axes(2, 2);
  axes.col(0) = u;
  axes.col(1) = p;
  const Vec center = axes * vec2(0.5 * (s0 + s1), 0.5 * (r0 + r1));
  return Region::box(center, axes, vec2(0.5 * (s1 - s0), 0.5 * (r1 - r0)));
}

/// Region containing {x in Omega : u . x >= tau}.
inline Region cap_region(const Domain& dom, const Vec& u, double tau) {
  if (dom.is_ball()) return Region::ball_slab(u, tau, 1.0);
  std::vector<Vec> pts;
  for (double sx : {-1.0, 1.0})
    for (double sy : {-1.0, 1.0}) {
      const Vec c = vec2(sx, sy);
      if (u.dot(c) >= tau) pts.push_back(c);
    }
  if (auto seg = square_chord(u, tau)) {
    pts.push_back(seg->first);
    pts.push_back(seg->second);
  }
  if (pts.empty()) return Region::box(Vec::Zero(2), Mat::Identity(2, 2), Vec::Zero(2));
  return hull_region(u, pts, 0.0);
}

// ---------------------------------------------------------------------------
// Three-atom approximation
// ---------------------------------------------------------------------------

enum class PlanarKind { Main, Zero, Affine };

struct PlanarApproximant {
  StripAssignment strip;
  PlanarKind kind = PlanarKind::Main;
  std::vector<Atom> atoms;    // phi_1, phi_2, phi_3 (or the affine matcher chords)
  std::vector<double> coefs;  // c_1, c_2, c_3
  Vec zeta;                   // intersection of the phi_2 and phi_3 lines (Main)
  std::vector<Region> support;  // phi - g vanishes outside the union

  bool degenerate() const { return kind != PlanarKind::Main; }
  double max_coef() const {
    double c = 0.0;
    for (double v : coefs) c = std::max(c, std::abs(v));
    return c;
  }

  AtomCombination combination() const {
    AtomCombination g;
    for (std::size_t k = 0; k < atoms.size(); ++k) g.add(atoms[k], coefs[k]);
    return g;
  }

  std::string kind_name() const {
    switch (kind) {
      case PlanarKind::Main: return "main";
      case PlanarKind::Zero: return "zero";
      case PlanarKind::Affine: return "affine";
    }
    return "?";
  }
};

namespace detail {

/// Affine matcher: g equals xi . x - t on the whole domain. Each grid chord
/// line l gives the exact affine function (l)_+ - (-l)_+; two diameters carry
/// the linear part and an antipodal pair of edge chords the constant, so
/// phi - g = (t - xi . x)_+ is supported in the cap beyond the chord.
inline PlanarApproximant affine_matcher(const Atom& atom, const BoundaryGrid& grid, PlanarApproximant out) {
  const int m = grid.m();
  const int h = m / 2;
  out.kind = PlanarKind::Affine;
  out.atoms.clear();
  out.coefs.clear();
  auto add_line = [&](const Atom& l, double c) {
    if (c == 0.0) return;
    out.atoms.push_back(l);
    out.coefs.push_back(c);
    out.atoms.emplace_back(-l.direction, -l.offset);
    out.coefs.push_back(-c);
  };
  // Linear part: the pair of diameters with the smallest coefficients.
  double best = 1e300;
  int r1 = 0, r2 = 1;
  Eigen::Vector2d bc(0.0, 0.0);
  for (int u = 0; u < h; ++u)
    for (int v = u + 1; v < h; ++v) {
      Eigen::Matrix2d M;
      M.col(0) = grid.chord_atom(u, u + h, 1.0).direction;
      M.col(1) = grid.chord_atom(v, v + h, 1.0).direction;
      if (std::abs(M.determinant()) < 1e-12) continue;
      const Eigen::Vector2d c = M.inverse() * Eigen::Vector2d(atom.direction(0), atom.direction(1));
      if (c.cwiseAbs().maxCoeff() < best - 1e-15) {
        best = c.cwiseAbs().maxCoeff();
        r1 = u;
        r2 = v;
        bc = c;
      }
    }
  add_line(grid.chord_atom(r1, r1 + h, 1.0), bc(0));
  add_line(grid.chord_atom(r2, r2 + h, 1.0), bc(1));
  // Constant: edge chords r and r + m/2, both positive at the centre, sum to -2 tau.
  int r = 0;
  for (int k = 1; k < h; ++k)
    if (std::abs(grid.chord_atom(k, k + 1, 1.0).offset) > std::abs(grid.chord_atom(r, r + 1, 1.0).offset)) r = k;
  Atom e1 = grid.chord_atom(r, r + 1, 1.0);
  if (e1.offset > 0.0) e1 = grid.chord_atom(r, r + 1, -1.0);
  Atom e2 = grid.chord_atom(r + h, r + h + 1, 1.0);
  if (e2.offset > 0.0) e2 = grid.chord_atom(r + h, r + h + 1, -1.0);
  const double cc = atom.offset / (e1.offset + e2.offset);
  add_line(e1, cc);
  add_line(e2, cc);
  out.support.clear();
  out.support.push_back(cap_region(grid.domain(), -atom.direction, -atom.offset));
  return out;
}

/// phi_1 = chord(P0, Q1), phi_2 = chord(P0, Q0), phi_3 = chord(P1, Q1) with
/// coefficients matching the affine part of phi at zeta, Q1 and P0.
inline PlanarApproximant three_atom(const Atom& atom, const BoundaryGrid& grid, PlanarApproximant out) {
  const StripAssignment& s = out.strip;
  auto orient = [&](int a, int b) {
    Atom c = grid.chord_atom(a, b, 1.0);
    if (c.direction.dot(atom.direction) < 0.0) c = grid.chord_atom(a, b, -1.0);
    return c;
  };
  const Atom phi1 = orient(s.i, s.j + 1);
  const Atom phi2 = orient(s.i, s.j);
  const Atom phi3 = orient(s.i + 1, s.j + 1);

  Eigen::Matrix2d M;
  M.row(0) = phi2.direction.transpose();
  M.row(1) = phi3.direction.transpose();
  if (std::abs(M.determinant()) < 1e-14) return affine_matcher(atom, grid, out);
  const Eigen::Vector2d zeta = M.inverse() * Eigen::Vector2d(phi2.offset, phi3.offset);
  out.zeta = zeta;

  const double c1 = atom.affine(out.zeta) / phi1.affine(out.zeta);
  const double c2 = atom.affine(s.Q1) / phi2.affine(s.Q1);
  const double c3 = atom.affine(s.P0) / phi3.affine(s.P0);
  out.kind = PlanarKind::Main;
  out.atoms = {phi1, phi2, phi3};
  out.coefs = {c1, c2, c3};

  std::vector<Vec> pts = {s.P0, s.P1, s.Q0, s.Q1};
  for (const Vec& c : grid.interior_corners(s.i)) pts.push_back(c);
  for (const Vec& c : grid.interior_corners(s.j)) pts.push_back(c);
  out.support = {hull_region(atom.direction, pts, grid.sagitta() + 1e-12)};
  return out;
}

}  // namespace detail

/// Three-atom approximation on a boundary grid (disk or square).
inline PlanarApproximant approximate_atom_on(const Atom& atom, const BoundaryGrid& grid) {
  PlanarApproximant out;
  out.strip = locate_strip(atom, grid);
  const StripAssignment& s = out.strip;
  const Domain& dom = grid.domain();

  if (s.gap <= 1) {
    // Endpoints on one arc or on adjacent arcs: phi is either confined to the
    // cap beyond its chord or affine away from it.
    if (-atom.offset <= 0.0) {
      out.kind = PlanarKind::Zero;
      out.support.push_back(cap_region(dom, atom.direction, atom.offset));
      return out;
    }
    return detail::affine_matcher(atom, grid, out);
  }

  PlanarApproximant best = detail::three_atom(atom, grid, out);
  if (s.gap * 2 == s.m && best.kind == PlanarKind::Main) {
    // Antipodal arcs: both index orders are admissible; keep the one with the
    // smaller coefficients.
    PlanarApproximant alt = out;
    std::swap(alt.strip.i, alt.strip.j);
    std::swap(alt.strip.a, alt.strip.b);
    std::swap(alt.strip.P0, alt.strip.Q0);
    std::swap(alt.strip.P1, alt.strip.Q1);
    alt = detail::three_atom(atom, grid, alt);
    if (alt.kind == PlanarKind::Main && alt.max_coef() < best.max_coef()) best = alt;
  }
  return best;
}

inline PlanarApproximant approximate_atom_planar(const Atom& atom, int m) {
  return approximate_atom_on(atom, BoundaryGrid(Domain::ball(2), m));
}

inline PlanarApproximant approximate_atom_square(const Atom& atom, int m) {
  return approximate_atom_on(atom, BoundaryGrid(Domain::square(), m));
}

/// Importance-sampled ||phi - g||_{L2} over the approximant's support.
inline IntegralEstimate planar_error(const Atom& atom, const PlanarApproximant& g, const Domain& dom,
                                     std::int64_t samples, std::uint64_t seed) {
  return l2_error_on(AtomCombination::single(atom), g.combination(), dom, g.support, samples, seed);
}

/// Dimension of the planar space X_n for m boundary points.
inline std::int64_t planar_dimension(int m) { return static_cast<std::int64_t>(m) * (m - 1); }

}  // namespace wvar
