#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "wvar/wvar.hpp"

using namespace wvar;

namespace {

// Boundary grid points, computed independently of the library.
Vec grid_point(const Domain& dom, int m, int j) {
  j = ((j % m) + m) % m;
  if (dom.is_ball()) return vec2(std::cos(2.0 * kPi * j / m), std::sin(2.0 * kPi * j / m));
  double s = 8.0 * j / m;
  if (s < 1.0) return vec2(1.0, s);
  if (s < 3.0) return vec2(2.0 - s, 1.0);
  if (s < 5.0) return vec2(-1.0, 4.0 - s);
  if (s < 7.0) return vec2(s - 6.0, -1.0);
  return vec2(1.0, s - 8.0);
}

double boundary_param(const Domain& dom, const Vec& x) {
  if (dom.is_ball()) {
    const double a = std::atan2(x(1), x(0));
    return a < 0 ? a + 2.0 * kPi : a;
  }
  if (std::abs(x(0) - 1.0) < 1e-12 && x(1) >= 0) return x(1);
  if (std::abs(x(1) - 1.0) < 1e-12) return 2.0 - x(0);
  if (std::abs(x(0) + 1.0) < 1e-12) return 4.0 - x(1);
  if (std::abs(x(1) + 1.0) < 1e-12) return 6.0 + x(0);
  return 8.0 + x(1);
}

// Boundary points covering the arc containing boundary point e: its two grid
// endpoints plus any square corners strictly inside.
std::vector<Vec> arc_points(const Domain& dom, int m, const Vec& e) {
  const double per = dom.is_ball() ? 2.0 * kPi : 8.0;
  double s = boundary_param(dom, e);
  if (s >= per) s -= per;
  const int i = static_cast<int>(std::floor(s / (per / m)));
  std::vector<Vec> pts = {grid_point(dom, m, i), grid_point(dom, m, i + 1)};
  if (!dom.is_ball()) {
    for (double c : {1.0, 3.0, 5.0, 7.0}) {
      const double a = per * i / m, b = per * (i + 1) / m;
      if (c > a && c < b) {
        const Vec corner = c == 1.0 ? vec2(1, 1) : c == 3.0 ? vec2(-1, 1) : c == 5.0 ? vec2(-1, -1) : vec2(1, -1);
        pts.push_back(corner);
      }
    }
  }
  return pts;
}

// x in the convex hull of the two arcs containing the chord endpoints (with margin).
bool in_arc_hull(const Domain& dom, int m, const Atom& atom, const Vec& x, double margin) {
  const auto ends = chord_endpoints(atom, dom);
  std::vector<Vec> pts = arc_points(dom, m, ends.first);
  for (const Vec& p : arc_points(dom, m, ends.second)) pts.push_back(p);
  if (dom.is_ball()) {
    // Circular segments beyond each arc chord belong to the hull of the arc.
    for (int k = 0; k < 2; ++k) {
      const Vec& a = pts[k == 0 ? 0 : pts.size() - 2];
      const Vec& b = pts[k == 0 ? 1 : pts.size() - 1];
      const Vec mid = (a + b) / (a + b).norm();
      if (mid.dot(x) >= mid.dot(a) - margin) return true;
    }
  }
  std::sort(pts.begin(), pts.end(), [](const Vec& p, const Vec& q) {
    return std::atan2(p(1), p(0)) < std::atan2(q(1), q(0));
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const Vec& p, const Vec& q) { return (p - q).norm() < 1e-14; }),
            pts.end());
  if (pts.size() < 3) return false;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const Vec& p = pts[k];
    const Vec& q = pts[(k + 1) % pts.size()];
    const double cross = (q(0) - p(0)) * (x(1) - p(1)) - (q(1) - p(1)) * (x(0) - p(0));
    if (cross < -margin * (q - p).norm()) return false;
  }
  return true;
}

Atom random_atom(const Domain& dom, Rng& rng) {
  const Vec xi = random_direction(2, rng);
  const auto [lo, hi] = dom.offset_range(xi);
  return Atom(xi, uniform(rng, lo, hi));
}

}  // namespace

TEST(ApproxPlanar, DiskCoefficientsAreBounded) {
  Rng rng(11);
  for (int m : {8, 16, 32, 64})
    for (int k = 0; k < 300; ++k) {
      const PlanarApproximant g = approximate_atom_planar(random_atom(Domain::ball(2), rng), m);
      for (double c : g.coefs) EXPECT_LE(std::abs(c), 1.0 + 1e-9) << "m=" << m;
    }
}

TEST(ApproxPlanar, SquareErrorScalesWithChordLength) {
  // ||phi - g|| <= C m^{-3/2} |L|^{1/2} with a uniform constant.
  Rng rng(12);
  double worst = 0.0;
  for (int m : {8, 16, 32, 64})
    for (int k = 0; k < 40; ++k) {
      const Atom atom = random_atom(Domain::square(), rng);
      const auto chord = square_chord(atom.direction, atom.offset);
      if (!chord) continue;
      const double len = (chord->second - chord->first).norm();
      if (len < 1e-6) continue;
      const PlanarApproximant g = approximate_atom_square(atom, m);
      const double err = planar_error(atom, g, Domain::square(), 20000, 5).value;
      worst = std::max(worst, err / (std::pow(m, -1.5) * std::sqrt(len)));
    }
  EXPECT_LT(worst, 10.0);
}

TEST(ApproxPlanar, AgreesOutsideTheStrip) {
  for (const Domain& dom : {Domain::ball(2), Domain::square()}) {
    Rng rng(dom.is_ball() ? 21 : 22);
    for (int m : {8, 16, 32})
      for (int k = 0; k < 60; ++k) {
        const Atom atom = random_atom(dom, rng);
        const PlanarApproximant g = approximate_atom_on(atom, BoundaryGrid(dom, m));
        if (g.kind != PlanarKind::Main) continue;
        const AtomCombination diff = AtomCombination::single(atom) - g.combination();
        for (int s = 0; s < 2000; ++s) {
          Vec x = dom.is_ball() ? sample_ball(2, rng) : vec2(uniform(rng, -1, 1), uniform(rng, -1, 1));
          if (in_arc_hull(dom, m, atom, x, 1e-9)) continue;
          ASSERT_LE(std::abs(diff(x)), 1e-9) << "m=" << m << " x=" << x.transpose();
        }
      }
  }
}

TEST(ApproxPlanar, AffineMatcherReproducesTheLinearPart) {
  // Offsets near -1: the chord is short and on the far side; g must equal xi . x - t.
  Rng rng(31);
  int seen = 0;
  for (int m : {8, 16, 32})
    for (int k = 0; k < 200; ++k) {
      const Atom atom(random_direction(2, rng), uniform(rng, -1.0, -0.9));
      const PlanarApproximant g = approximate_atom_planar(atom, m);
      if (g.kind != PlanarKind::Affine) continue;
      ++seen;
      const AtomCombination gc = g.combination();
      for (int s = 0; s < 200; ++s) {
        const Vec x = sample_ball(2, rng);
        EXPECT_NEAR(gc(x), atom.direction.dot(x) - atom.offset, 1e-12);
      }
      for (double c : g.coefs) EXPECT_LE(std::abs(c), 1.0 + 1e-9);
    }
  EXPECT_GT(seen, 0);
}

TEST(ApproxPlanar, ZeroKindOnlyForShortChordsNearOne) {
  Rng rng(32);
  for (int k = 0; k < 200; ++k) {
    const Atom atom(random_direction(2, rng), uniform(rng, 0.995, 0.99999));
    const PlanarApproximant g = approximate_atom_planar(atom, 16);
    EXPECT_EQ(g.kind, PlanarKind::Zero);
    EXPECT_TRUE(g.combination().empty());
  }
}

TEST(ApproxPlanar, ErrorScalesWithWeightAndResolution) {
  // ||phi - g|| <= C w(phi) n^{-3/4} with a uniform constant.
  const WeightFn wf = WeightFn::ball_power(2);
  Rng rng(41);
  double worst = 0.0;
  for (int m : {8, 16, 32, 64})
    for (int k = 0; k < 40; ++k) {
      const Atom atom = random_atom(Domain::ball(2), rng);
      const PlanarApproximant g = approximate_atom_planar(atom, m);
      const double err = planar_error(atom, g, Domain::ball(2), 20000, 5).value;
      const double w = wf(atom);
      if (w > 0.0) worst = std::max(worst, err / (w * std::pow(m * (m - 1.0), -0.75)));
    }
  EXPECT_LT(worst, 10.0);
}

TEST(ApproxPlanar, ErrorDecreasesWithResolution) {
  const Atom atom(vec2(std::cos(0.37), std::sin(0.37)), 0.5);
  double prev = 1e300;
  for (int m : {8, 16, 32, 64}) {
    const double e = planar_error(atom, approximate_atom_planar(atom, m), Domain::ball(2), 100000, 3).value;
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(ApproxPlanar, StripLocation) {
  const Atom atom(unit_vector(2, 0), 0.0);  // chord from (0,-1) to (0,1)
  const StripAssignment s = locate_strip(atom, 8);
  EXPECT_EQ(s.gap, 4);
  EXPECT_EQ(s.dist(), 4);
  EXPECT_THROW(BoundaryGrid(Domain::ball(2), 7), InvalidArgument);
}
