#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "wvar/common.hpp"
#include "wvar/types.hpp"

namespace wvar {

// ---------------------------------------------------------------------------
// Direction grid W_k: dyadic vertices on the faces of [-1,1]^d, normalized.
// ---------------------------------------------------------------------------

/// A cube-boundary vertex in integer units of 2^{1-k}: coordinate i is
/// key[i] / 2^k with key[i] in [-2^k, 2^k] and even offset from -2^k.
using VertexKey = std::vector<std::int64_t>;

struct DirectionGrid {
  int dim = 2;
  int k = 1;
  std::vector<Vec> points;
  std::vector<VertexKey> keys;          // cube vertex of each point
  std::map<VertexKey, int> index_of;    // inverse of keys

  std::int64_t resolution() const { return std::int64_t{1} << k; }  // m = 2^k
  std::size_t size() const { return points.size(); }

  /// Direction for a cube vertex given in integer units; throws if absent.
  int find(const VertexKey& key) const {
    auto it = index_of.find(key);
    if (it == index_of.end()) throw Error("DirectionGrid: vertex not in grid");
    return it->second;
  }
};

/// Number of distinct boundary vertices: (m+1)^d - (m-1)^d with m = 2^k.
inline std::int64_t direction_grid_count(int d, int k) {
  const std::int64_t m = std::int64_t{1} << k;
  std::int64_t a = 1, b = 1;
  for (int i = 0; i < d; ++i) {
    a *= (m + 1);
    b *= (m - 1);
  }
  return a - b;
}

inline Vec vertex_to_direction(const VertexKey& key, int k) {
  const double scale = std::ldexp(1.0, -k);
  Vec v(static_cast<int>(key.size()));
  for (std::size_t i = 0; i < key.size(); ++i) v(static_cast<int>(i)) = static_cast<double>(key[i]) * scale;
  return v / v.norm();
}

inline DirectionGrid build_direction_grid(int d, int k, double cap = 1e7) {
  require(d >= 2, "build_direction_grid: d must be >= 2");
  require(k >= 1, "build_direction_grid: k must be >= 1");
  require(k * (d - 1) < 62, "build_direction_grid: grid size overflows");
  const double per_face = std::pow(std::ldexp(1.0, k) + 1.0, d - 1);
  if (std::ldexp(1.0, k * (d - 1)) > cap || 2.0 * d * per_face > 10.0 * cap)
    throw InvalidArgument("build_direction_grid: 2^{k(d-1)} exceeds the configured cap");
  const std::int64_t m = std::int64_t{1} << k;
  DirectionGrid g;
  g.dim = d;
  g.k = k;
  // Enumerate every face vertex; the ordered map deduplicates shared vertices
  // and fixes a lexicographic order.
  std::map<VertexKey, int> seen;
  const std::int64_t per = m + 1;
  for (int axis = 0; axis < d; ++axis) {
    for (int sign : {-1, 1}) {
      std::vector<std::int64_t> idx(d - 1, 0);
      while (true) {
        VertexKey key(d);
        int c = 0;
        for (int i = 0; i < d; ++i) key[i] = (i == axis) ? sign * m : 2 * idx[c++] - m;
        seen.emplace(key, 0);
        int p = 0;
        while (p < d - 1 && ++idx[p] == per) idx[p++] = 0;
        if (p == d - 1) break;
      }
    }
  }
  for (auto& [key, id] : seen) {
    id = static_cast<int>(g.points.size());
    g.points.push_back(vertex_to_direction(key, k));
    g.keys.push_back(key);
  }
  g.index_of = std::move(seen);
  return g;
}

struct QuasiUniformity {
  double min_nn = 0.0;  // min over points of nearest-neighbour distance
  double max_nn = 0.0;  // max over points of nearest-neighbour distance
  double c0 = 0.0;      // min_nn * 2^k
  double C0 = 0.0;      // max_nn * 2^k
};

inline QuasiUniformity measure_quasi_uniformity(const DirectionGrid& g) {
  QuasiUniformity q;
  q.min_nn = 1e300;
  const std::size_t n = g.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    double best = 1e300;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) best = std::min(best, (g.points[i] - g.points[j]).norm());
    q.min_nn = std::min(q.min_nn, best);
    q.max_nn = std::max(q.max_nn, best);
  }
  const double m = std::ldexp(1.0, g.k);
  q.c0 = q.min_nn * m;
  q.C0 = q.max_nn * m;
  return q;
}

// ---------------------------------------------------------------------------
// Offset grid T_m
// ---------------------------------------------------------------------------

struct OffsetGrid {
  int m = 2;
  std::vector<double> points;  // points[j-1] = t_j, j = 1..2m
  bool spacing_ok = true;      // the graded-spacing inequalities hold

  std::size_t size() const { return points.size(); }
  /// 1-based access matching t_1 < ... < t_{2m}.
  double t(int j) const { return points.at(static_cast<std::size_t>(j - 1)); }
};

/// Checks pi sqrt(1 - t_{j+1}^2)/(2m) <= t_{j+1} - t_j <= pi sqrt(1 - t_j^2)/(2m)
/// for m < j < 2m - 1.
inline bool check_offset_spacing(const OffsetGrid& g, double tol = 1e-12) {
  const int m = g.m;
  for (int j = m + 1; j < 2 * m - 1; ++j) {
    const double gap = g.t(j + 1) - g.t(j);
    const double lo = kPi * std::sqrt(1.0 - g.t(j + 1) * g.t(j + 1)) / (2.0 * m);
    const double hi = kPi * std::sqrt(1.0 - g.t(j) * g.t(j)) / (2.0 * m);
    if (gap < lo - tol || gap > hi + tol) return false;
  }
  return true;
}

inline OffsetGrid build_offset_grid(int m) {
  require(m >= 2, "build_offset_grid: m must be >= 2");
  OffsetGrid g;
  g.m = m;
  g.points.resize(2 * m);
  for (int j = 1; j <= m; ++j) g.points[j - 1] = -1.0 + static_cast<double>(j) / m;
  for (int j = 1; j <= m; ++j) g.points[m + j - 1] = std::cos(kPi * (m - j) / (2.0 * m));
  g.points[2 * m - 1] = 1.0;
  g.spacing_ok = check_offset_spacing(g);
  return g;
}

// ---------------------------------------------------------------------------
// Dictionary Phi_{k,m}
// ---------------------------------------------------------------------------

struct DiscreteDictionary {
  DirectionGrid directions;
  OffsetGrid offsets;
  std::vector<Atom> atoms;  // atom (i, j) at index i * offsets.size() + j

  int dim() const { return directions.dim; }
  int m() const { return offsets.m; }
  std::size_t size() const { return atoms.size(); }
  std::size_t index(std::size_t dir, std::size_t off) const { return dir * offsets.size() + off; }
  const Atom& atom(std::size_t dir, std::size_t off) const { return atoms[index(dir, off)]; }
};

inline DiscreteDictionary make_dictionary(DirectionGrid dirs, OffsetGrid offs) {
  DiscreteDictionary dict;
  dict.directions = std::move(dirs);
  dict.offsets = std::move(offs);
  dict.atoms.reserve(dict.directions.size() * dict.offsets.size());
  for (const Vec& xi : dict.directions.points)
    for (double t : dict.offsets.points) dict.atoms.emplace_back(xi, t);
  return dict;
}

/// Dictionary size for resolution k in dimension d: |W_k| * 2^{k+1}.
inline std::int64_t dictionary_size(int d, int k) { return direction_grid_count(d, k) * (std::int64_t{2} << k); }

/// Largest k >= 1 with dictionary_size(d, k) <= n; throws if none.
inline int dictionary_level(int d, std::int64_t n) {
  require(d >= 2, "dictionary_level: d must be >= 2");
  if (dictionary_size(d, 1) > n)
    throw BelowResolution("build_dictionary: budget n=" + std::to_string(n) + " too small for d=" + std::to_string(d));
  int k = 1;
  while (k * (d - 1) < 40 && dictionary_size(d, k + 1) <= n) ++k;
  return k;
}

inline DiscreteDictionary build_dictionary(int d, std::int64_t n) {
  const int k = dictionary_level(d, n);
  return make_dictionary(build_direction_grid(d, k), build_offset_grid(1 << k));
}

inline nlohmann::ordered_json dictionary_to_json(const DiscreteDictionary& dict) {
  nlohmann::ordered_json j;
  j["dim"] = dict.dim();
  j["k"] = dict.directions.k;
  j["m"] = dict.m();
  nlohmann::ordered_json dirs = nlohmann::ordered_json::array();
  for (const Vec& v : dict.directions.points) dirs.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  j["directions"] = dirs;
  j["offsets"] = dict.offsets.points;
  nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < dict.directions.size(); ++i)
    for (std::size_t o = 0; o < dict.offsets.size(); ++o) pairs.push_back({i, o});
  j["atoms"] = pairs;
  return j;
}

// ---------------------------------------------------------------------------
// Planar boundary points
// ---------------------------------------------------------------------------

/// mu_j = (cos 2 pi j / m, sin 2 pi j / m), j = 0..m-1.
inline std::vector<Vec> planar_boundary_points(int m) {
  require(m >= 4 && m % 2 == 0, "planar_boundary_points: m must be even and >= 4");
  std::vector<Vec> pts;
  pts.reserve(m);
  for (int j = 0; j < m; ++j) {
    const double a = 2.0 * kPi * j / m;
    pts.push_back(vec2(std::cos(a), std::sin(a)));
  }
  return pts;
}

/// Periodic distance between indices i and j modulo m.
inline int periodic_distance(int i, int j, int m) {
  int r = ((i - j) % m + m) % m;
  return std::min(r, m - r);
}

}  // namespace wvar
