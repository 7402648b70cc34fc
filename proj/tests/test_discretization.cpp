#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "wvar/wvar.hpp"

using namespace wvar;

namespace {

// Brute force: integer points of {-m, -m+2, ..., m}^d with some |coordinate| = m.
std::int64_t brute_vertex_count(int d, int k) {
  const int m = 1 << k;
  std::int64_t count = 0;
  std::vector<int> idx(d, 0);
  while (true) {
    bool on_face = false;
    for (int i = 0; i < d; ++i)
      if (idx[i] == 0 || idx[i] == m) on_face = true;
    count += on_face;
    int p = 0;
    while (p < d && ++idx[p] == m + 1) idx[p++] = 0;
    if (p == d) break;
  }
  return count;
}

}  // namespace

TEST(Discretization, DirectionCountMatchesBruteForce) {
  for (int d : {2, 3, 4})
    for (int k : {1, 2, 3}) {
      EXPECT_EQ(direction_grid_count(d, k), brute_vertex_count(d, k)) << d << "," << k;
      EXPECT_EQ(static_cast<std::int64_t>(build_direction_grid(d, k).size()), brute_vertex_count(d, k));
    }
  EXPECT_EQ(build_direction_grid(3, 1).size(), 26u);
  EXPECT_EQ(build_direction_grid(2, 2).size(), 16u);
}

TEST(Discretization, DirectionsAreDistinctUnitVectors) {
  const DirectionGrid g = build_direction_grid(3, 2);
  std::set<std::vector<long long>> keys;
  for (const Vec& v : g.points) {
    EXPECT_NEAR(v.norm(), 1.0, 1e-14);
    keys.insert({std::llround(v(0) * 1e9), std::llround(v(1) * 1e9), std::llround(v(2) * 1e9)});
  }
  EXPECT_EQ(keys.size(), g.size());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.find(g.keys[i]), static_cast<int>(i));
}

TEST(Discretization, DirectionGridIsQuasiUniform) {
  for (int k : {1, 2, 3}) {
    const QuasiUniformity q = measure_quasi_uniformity(build_direction_grid(3, k));
    // Face vertices are 2/m apart; x -> x/|x| is 1-Lipschitz outside the unit
    // ball and contracts face distances by at most |x|^2 <= d.
    EXPECT_GE(q.min_nn * std::ldexp(1.0, k), 2.0 / 3.0 - 1e-12);
    EXPECT_LE(q.max_nn * std::ldexp(1.0, k), 2.0 + 1e-12);
  }
}

TEST(Discretization, OffsetGridValues) {
  for (int m : {2, 4, 8, 16, 64}) {
    const OffsetGrid g = build_offset_grid(m);
    ASSERT_EQ(g.size(), static_cast<std::size_t>(2 * m));
    for (int j = 1; j <= m; ++j) EXPECT_DOUBLE_EQ(g.t(j), -1.0 + static_cast<double>(j) / m);
    for (int j = m + 1; j < 2 * m; ++j) EXPECT_NEAR(g.t(j), std::sin(kPi * (j - m) / (2.0 * m)), 1e-15);
    EXPECT_EQ(g.t(2 * m), 1.0);
    for (int j = 1; j < 2 * m; ++j) EXPECT_LT(g.t(j), g.t(j + 1));
    EXPECT_TRUE(g.spacing_ok);
  }
}

TEST(Discretization, GradedSpacingNearOne) {
  const int m = 32;
  const OffsetGrid g = build_offset_grid(m);
  for (int j = m + 1; j < 2 * m - 1; ++j) {
    const double gap = g.t(j + 1) - g.t(j);
    EXPECT_LE(gap, kPi * std::sqrt(1.0 - g.t(j) * g.t(j)) / (2.0 * m) + 1e-15);
    EXPECT_GE(gap, kPi * std::sqrt(1.0 - g.t(j + 1) * g.t(j + 1)) / (2.0 * m) - 1e-15);
  }
}

TEST(Discretization, DictionarySizeAndLevel) {
  EXPECT_EQ(dictionary_size(3, 1), 26 * 4);
  EXPECT_EQ(dictionary_size(2, 3), 32 * 16);
  for (int d : {2, 3})
    for (std::int64_t n : {200, 1000, 5000, 30000}) {
      if (dictionary_size(d, 1) > n) continue;
      const int k = dictionary_level(d, n);
      EXPECT_LE(dictionary_size(d, k), n);
      EXPECT_GT(dictionary_size(d, k + 1), n);
      const DiscreteDictionary dict = build_dictionary(d, n);
      EXPECT_EQ(static_cast<std::int64_t>(dict.size()), dictionary_size(d, k));
    }
  EXPECT_THROW(build_dictionary(3, 50), BelowResolution);
}

TEST(Discretization, DictionaryIndexing) {
  const DiscreteDictionary dict = build_dictionary(3, 1000);
  for (std::size_t i = 0; i < dict.directions.size(); i += 7)
    for (std::size_t j = 0; j < dict.offsets.size(); ++j) {
      EXPECT_EQ((dict.atom(i, j).direction - dict.directions.points[i]).norm(), 0.0);
      EXPECT_EQ(dict.atom(i, j).offset, dict.offsets.points[j]);
    }
}

TEST(Discretization, DictionaryJsonExport) {
  const DiscreteDictionary dict = make_dictionary(build_direction_grid(3, 1), build_offset_grid(2));
  const auto j = dictionary_to_json(dict);
  EXPECT_EQ(j["dim"], 3);
  EXPECT_EQ(j["k"], 1);
  EXPECT_EQ(j["m"], 2);
  EXPECT_EQ(j["directions"].size(), 26u);
  EXPECT_EQ(j["offsets"].size(), 4u);
  EXPECT_EQ(j["atoms"].size(), 104u);
  const auto round = nlohmann::ordered_json::parse(j.dump());
  EXPECT_EQ(round, j);
}

TEST(Discretization, PlanarBoundaryPoints) {
  const auto pts = planar_boundary_points(8);
  ASSERT_EQ(pts.size(), 8u);
  for (std::size_t j = 0; j < pts.size(); ++j) {
    EXPECT_NEAR(pts[j].norm(), 1.0, 1e-15);
    EXPECT_NEAR((pts[j] - pts[(j + 1) % 8]).norm(), 2.0 * std::sin(kPi / 8.0), 1e-14);
  }
  EXPECT_EQ(periodic_distance(1, 7, 8), 2);
  EXPECT_EQ(periodic_distance(0, 4, 8), 4);
  EXPECT_THROW(planar_boundary_points(7), InvalidArgument);
}
