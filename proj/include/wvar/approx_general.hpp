#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "wvar/common.hpp"
#include "wvar/discretization.hpp"
#include "wvar/geometry.hpp"
#include "wvar/measure.hpp"
#include "wvar/types.hpp"

namespace wvar {

// ---------------------------------------------------------------------------
// Cap containment and offset promotion
// ---------------------------------------------------------------------------

/// Minimum of xi . x over {x in B^d : xi_i . x >= t_j}.
inline double cap_min(const Vec& xi_i, double t_j, const Vec& xi) {
  const double c = std::clamp(xi.dot(xi_i), -1.0, 1.0);
  if (-c >= t_j) return -1.0;
  const double tj = std::clamp(t_j, -1.0, 1.0);
  return tj * c - std::sqrt(std::max(0.0, 1.0 - tj * tj)) * std::sqrt(std::max(0.0, 1.0 - c * c));
}

/// True iff {x in B^d : xi_i . x >= t_j} is inside {x : xi . x >= t}
/// (boundary equality counts, with 1e-12 slack).
inline bool halfspace_contained(const Vec& xi_i, double t_j, const Vec& xi, double t) {
  if (t_j > 1.0) return true;
  return cap_min(xi_i, t_j, xi) >= t - kGeomTol;
}

struct OffsetPromotion {
  int index = 0;        // 1-based j with t_plus = t_j
  double t_plus = 0.0;  // smallest contained grid offset
  double t_tilde = 0.0; // t_{j+1}
};

/// Smallest t_j in T_m with a contained cap, and its successor. Throws
/// BelowResolution if the first contained offset is t_{2m} (no successor).
inline OffsetPromotion t_plus(const Vec& xi_i, const Vec& xi, double t, const OffsetGrid& grid) {
  const int n = static_cast<int>(grid.size());
  // Containment is monotone in t_j, so binary search for the first hit.
  int lo = 1, hi = n + 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (halfspace_contained(xi_i, grid.t(mid), xi, t))
      hi = mid;
    else
      lo = mid + 1;
  }
  if (lo > n - 1)
    throw BelowResolution("t_plus: no contained offset below t_{2m} (m=" + std::to_string(grid.m) + ")");
  return {lo, grid.t(lo), grid.t(lo + 1)};
}

// ---------------------------------------------------------------------------
// Direction decomposition
// ---------------------------------------------------------------------------

struct DirectionDecomposition {
  std::vector<std::pair<int, double>> pairs;  // (grid index, b_j), sum b_j = 1
  bool grid_case = false;
  int face_axis = 0;
  int face_sign = 1;
  int A = 2;
  double eps = 0.0;      // S - 1 (fine cell)
  double eps_c = 0.0;    // S' - 1 (coarse cell)
  double alpha = 1.0;    // weight of the fine representation
  double sigma = 0.0;    // sum over e != 0 of l_e(y)
  double delta = 0.0;    // 1 / m

  std::vector<int> neighbors() const {
    std::vector<int> out;
    for (const auto& [i, b] : pairs) out.push_back(i);
    return out;
  }
  double sum() const {
    double s = 0.0;
    for (const auto& [i, b] : pairs) s += b;
    return s;
  }
  double l1() const {
    double s = 0.0;
    for (const auto& [i, b] : pairs) s += std::abs(b);
    return s;
  }
  Vec reconstruct(const DirectionGrid& g) const {
    Vec v = Vec::Zero(g.dim);
    for (const auto& [i, b] : pairs) v += b * g.points[static_cast<std::size_t>(i)];
    return v;
  }
  /// |eps_c| / (sigma delta^2), reported only.
  double eps_ratio() const { return sigma > 0.0 ? std::abs(eps_c) / (sigma * delta * delta) : 0.0; }
};

inline DirectionDecomposition decompose_direction(const Vec& xi, const DirectionGrid& grid, int A = 2) {
  const int d = grid.dim;
  require(xi.size() == d, "decompose_direction: dimension mismatch");
  require(std::abs(xi.norm() - 1.0) <= 1e-12, "decompose_direction: xi must be a unit vector");
  require(A >= 2, "decompose_direction: A must be >= 2");
  const std::int64_t m = grid.resolution();
  DirectionDecomposition dec;
  dec.A = A;
  dec.delta = 1.0 / static_cast<double>(m);

  int f = 0;
  for (int i = 1; i < d; ++i)
    if (std::abs(xi(i)) > std::abs(xi(f))) f = i;
  const int sg = xi(f) >= 0.0 ? 1 : -1;
  dec.face_axis = f;
  dec.face_sign = sg;
  const Vec bar = xi / std::abs(xi(f));
  const double bar_norm = bar.norm();

  // Cell coordinates u in [0, m] along each free axis (fine cell side 2/m).
  std::vector<int> free_axes;
  for (int i = 0; i < d; ++i)
    if (i != f) free_axes.push_back(i);
  const int r = d - 1;
  std::vector<double> u(r);
  for (int c = 0; c < r; ++c)
    u[c] = std::clamp((bar(free_axes[c]) + 1.0) * 0.5 * static_cast<double>(m), 0.0, static_cast<double>(m));

  auto key_of = [&](const std::vector<std::int64_t>& cell) {
    VertexKey key(d);
    key[f] = sg * m;
    for (int c = 0; c < r; ++c) key[free_axes[c]] = 2 * cell[c] - m;
    return key;
  };
  auto vertex_scale = [&](const std::vector<std::int64_t>& cell) {
    double s = 1.0;
    for (int c = 0; c < r; ++c) {
      const double v = -1.0 + 2.0 * static_cast<double>(cell[c]) / static_cast<double>(m);
      s += v * v;
    }
    return std::sqrt(s);
  };

  // Grid case: xi is (within 1e-12) a normalized face vertex.
  {
    bool on_vertex = true;
    std::vector<std::int64_t> cell(r);
    for (int c = 0; c < r; ++c) {
      const double nearest = std::round(u[c]);
      if (std::abs(u[c] - nearest) * 2.0 / static_cast<double>(m) > 1e-12) on_vertex = false;
      cell[c] = static_cast<std::int64_t>(nearest);
    }
    if (on_vertex) {
      const int idx = grid.find(key_of(cell));
      if ((grid.points[static_cast<std::size_t>(idx)] - xi).norm() <= 1e-12) {
        dec.grid_case = true;
        dec.pairs = {{idx, 1.0}};
        return dec;
      }
    }
  }

  // Per-axis origin and orientation so that both the fine cell and the
  // coarse cell (A times larger, sharing the origin vertex) stay on the face.
  std::vector<std::int64_t> origin(r);
  std::vector<int> dir(r);
  std::vector<double> y(r);
  for (int c = 0; c < r; ++c) {
    std::int64_t q = static_cast<std::int64_t>(std::floor(u[c]));
    q = std::clamp<std::int64_t>(q, 0, m - 1);
    if (q + A <= m) {
      origin[c] = q;
      dir[c] = 1;
    } else if (q + 1 - A >= 0) {
      origin[c] = q + 1;
      dir[c] = -1;
    } else {
      throw BelowResolution("decompose_direction: coarse cell does not fit on the face (m too small for A)");
    }
    y[c] = std::clamp(dir[c] * (u[c] - static_cast<double>(origin[c])), 0.0, 1.0);
  }

  std::map<int, double> fine, coarse;
  double S = 0.0, Sc = 0.0, sigma = 0.0;
  const int corners = 1 << r;
  for (int e = 0; e < corners; ++e) {
    double le = 1.0;
    std::vector<std::int64_t> vf(r), vc(r);
    for (int c = 0; c < r; ++c) {
      const int bit = (e >> c) & 1;
      le *= bit ? y[c] : 1.0 - y[c];
      vf[c] = origin[c] + dir[c] * bit;
      vc[c] = origin[c] + dir[c] * bit * A;
    }
    if (e != 0) sigma += le;
    const double gamma_c = (e == 0) ? 1.0 - 1.0 / A + le / A : le / A;
    const double af = le * vertex_scale(vf) / bar_norm;
    const double ac = gamma_c * vertex_scale(vc) / bar_norm;
    fine[grid.find(key_of(vf))] += af;
    coarse[grid.find(key_of(vc))] += ac;
    S += af;
    Sc += ac;
  }
  dec.eps = S - 1.0;
  dec.eps_c = Sc - 1.0;
  dec.sigma = sigma;
  if (!(0.0 < 2.0 * std::abs(dec.eps) && 2.0 * std::abs(dec.eps) < std::abs(dec.eps_c)))
    throw BelowResolution("decompose_direction: sum condition 0 < 2|eps| < |eps'| fails (m or A too small)");
  dec.alpha = dec.eps_c / (dec.eps_c - dec.eps);

  std::map<int, double> merged;
  for (const auto& [i, a] : fine) merged[i] += dec.alpha * a;
  for (const auto& [i, a] : coarse) merged[i] += (1.0 - dec.alpha) * a;
  for (const auto& [i, b] : merged) dec.pairs.emplace_back(i, b);
  return dec;
}

// ---------------------------------------------------------------------------
// Atom approximation
// ---------------------------------------------------------------------------

enum class GeneralKind { Main, Grid, Zero, LeastSquares };

inline std::string general_kind_name(GeneralKind k) {
  switch (k) {
    case GeneralKind::Main: return "main";
    case GeneralKind::Grid: return "grid";
    case GeneralKind::Zero: return "zero";
    case GeneralKind::LeastSquares: return "least-squares";
  }
  return "?";
}

struct GeneralOptions {
  int A = 2;
  /// Offsets t > t_{2m-L}, L = (A+1)^2, take g = 0. Disable to run the main
  /// construction up to the last promotable offset.
  bool zero_above_threshold = true;
  /// Use a least-squares fit onto nearby grid atoms for t <= 1/2 instead of
  /// the main construction.
  bool least_squares_low_t = false;
  std::int64_t ls_samples = 20000;
  std::uint64_t seed = 0;
};

struct GeneralApproximant {
  GeneralKind kind = GeneralKind::Main;
  Atom atom;
  DirectionDecomposition decomposition;
  std::vector<OffsetPromotion> promotions;  // per neighbour, same order as decomposition.pairs
  int plus_index = 0;                       // 1-based index of t_plus in T_m
  double t_plus = 0.0, t_tilde = 0.0, beta = 1.0;
  int L = 9;                                // (A + 1)^2, reported
  AtomCombination g;
  double alpha_max = 1.0;  // every disagreement point has t < xi . x <= alpha_max

  double l1_mass() const { return g.l1_mass(); }
};

namespace detail {

/// Least-squares fit of phi onto grid atoms near (xi, t) with a Monte Carlo Gram.
inline AtomCombination least_squares_fit(const Atom& atom, const DiscreteDictionary& dict,
                                         const std::vector<int>& dirs, int center_j, std::int64_t samples,
                                         std::uint64_t seed) {
  std::vector<Atom> basis;
  const int n_off = static_cast<int>(dict.offsets.size());
  for (int di : dirs)
    for (int j = std::max(1, center_j - 1); j <= std::min(n_off, center_j + 2); ++j)
      basis.push_back(dict.atom(static_cast<std::size_t>(di), static_cast<std::size_t>(j - 1)));
  const Domain dom = Domain::ball(dict.dim());
  const EmpiricalMeasure meas = domain_measure(dom, samples, seed);
  Mat B(meas.size(), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k)
    B.col(static_cast<Eigen::Index>(k)) = AtomCombination::single(basis[k]).evaluate(meas.points);
  const Vec y = AtomCombination::single(atom).evaluate(meas.points);
  const Vec sw = meas.weights.array().sqrt();
  const Mat Bw = sw.asDiagonal() * B;
  const Vec c = Bw.completeOrthogonalDecomposition().solve(sw.asDiagonal() * y);
  AtomCombination g;
  for (std::size_t k = 0; k < basis.size(); ++k)
    if (c(static_cast<Eigen::Index>(k)) != 0.0) g.add(basis[k], c(static_cast<Eigen::Index>(k)));
  return g;
}

inline double slab_top(const Vec& xi, const Vec& xi_i, double t_tilde) {
  const double c = std::clamp(xi.dot(xi_i), -1.0, 1.0);
  if (c <= t_tilde) return 1.0;
  const double tt = std::clamp(t_tilde, -1.0, 1.0);
  return std::min(1.0, tt * c + std::sqrt(std::max(0.0, 1.0 - tt * tt)) * std::sqrt(std::max(0.0, 1.0 - c * c)));
}

}  // namespace detail

/// Approximation of phi(.; xi, t) on B^d by atoms of the dictionary.
/// Branches: t >= 1 or no promotable offset -> g = 0; xi in W_k -> two-offset
/// matcher; otherwise the two-cell decomposition with offsets t_plus, t_tilde.
inline GeneralApproximant approximate_atom_general(const Atom& atom, const DiscreteDictionary& dict,
                                                   const GeneralOptions& opt = {}) {
  require(atom.dim() == dict.dim(), "approximate_atom_general: dimension mismatch");
  GeneralApproximant out;
  out.atom = atom;
  out.L = (opt.A + 1) * (opt.A + 1);
  const double t = atom.offset;
  const Vec& xi = atom.direction;
  const int m = dict.m();
  if (t >= 1.0 || (opt.zero_above_threshold && 2 * m - out.L >= 1 && t > dict.offsets.t(2 * m - out.L))) {
    out.kind = GeneralKind::Zero;
    return out;
  }

  out.decomposition = decompose_direction(xi, dict.directions, opt.A);
  const DirectionDecomposition& dec = out.decomposition;

  try {
    for (const auto& [idx, b] : dec.pairs)
      out.promotions.push_back(t_plus(dict.directions.points[static_cast<std::size_t>(idx)], xi, t, dict.offsets));
  } catch (const BelowResolution&) {
    out.kind = GeneralKind::Zero;
    out.promotions.clear();
    out.alpha_max = 1.0;
    return out;
  }
  int j = 0;
  for (const auto& p : out.promotions) j = std::max(j, p.index);
  out.plus_index = j;
  out.t_plus = dict.offsets.t(j);
  out.t_tilde = dict.offsets.t(j + 1);
  out.beta = (t - out.t_tilde) / (out.t_plus - out.t_tilde);
  out.kind = dec.grid_case ? GeneralKind::Grid : GeneralKind::Main;

  if (opt.least_squares_low_t && t <= 0.5) {
    out.kind = GeneralKind::LeastSquares;
    out.g = detail::least_squares_fit(atom, dict, dec.neighbors(), j, opt.ls_samples, opt.seed);
    out.alpha_max = 1.0;
    return out;
  }

  for (const auto& [idx, b] : dec.pairs) {
    const double cp = out.beta * b, ct = (1.0 - out.beta) * b;
    if (cp != 0.0) out.g.add(dict.atom(static_cast<std::size_t>(idx), static_cast<std::size_t>(j - 1)), cp);
    if (ct != 0.0) out.g.add(dict.atom(static_cast<std::size_t>(idx), static_cast<std::size_t>(j)), ct);
  }
  out.alpha_max = -1.0;
  for (const auto& [idx, b] : dec.pairs)
    out.alpha_max = std::max(out.alpha_max,
                             detail::slab_top(xi, dict.directions.points[static_cast<std::size_t>(idx)], out.t_tilde));
  out.alpha_max = std::max(out.alpha_max, t);
  return out;
}

/// Region outside which phi - g vanishes (a slab of the ball).
inline Region general_error_region(const GeneralApproximant& g) {
  if (g.kind == GeneralKind::LeastSquares) return Region::whole_ball(g.atom.dim());
  return Region::ball_slab(g.atom.direction, g.atom.offset, g.alpha_max);
}

struct ErrorRegionReport {
  double sup_gap = 0.0;          // max sampled |phi - g| on the error region
  double region_measure = 0.0;   // estimated |Omega~|
  double region_stderr = 0.0;
  double l2_error = 0.0;         // ||phi - g||_{L2(B^d)}
  double l2_stderr = 0.0;
  double sup_constant = 0.0;     // sup_gap * m / sqrt(1 - t^2)
  double measure_constant = 0.0; // region_measure * m / (1 - t^2)^{d/2}
  std::int64_t outside_violations = 0;  // samples with phi != g outside Omega~
};

/// Monte Carlo diagnostics on the slab t < xi . x <= alpha_max, which contains
/// the error region Omega~ = {xi . x > t, xi_i . x <= t~ for some neighbour}.
inline ErrorRegionReport error_region_diagnostics(const GeneralApproximant& g, const DiscreteDictionary& dict,
                                                  const QuadratureSpec& q) {
  ErrorRegionReport rep;
  const Atom& atom = g.atom;
  const int d = atom.dim();
  const double t = atom.offset;
  if (t >= 1.0) return rep;
  const Region slab = general_error_region(g);
  const std::int64_t n = q.is_slice() ? 100000 : q.samples;
  const EmpiricalMeasure meas = mixture_measure(Domain::ball(d), {slab}, n, q.seed);
  const Vec diff = (AtomCombination::single(atom) - g.g).evaluate(meas.points);
  Vec in_region = Vec::Zero(meas.size());
  for (std::int64_t s = 0; s < meas.size(); ++s) {
    if (meas.weights(s) == 0.0) continue;
    const auto x = meas.points.col(s);
    bool inside = false;
    if (atom.direction.dot(x) > t) {
      if (g.kind == GeneralKind::Zero || g.kind == GeneralKind::LeastSquares) {
        inside = true;
      } else {
        for (const auto& [idx, b] : g.decomposition.pairs)
          if (dict.directions.points[static_cast<std::size_t>(idx)].dot(x) <= g.t_tilde) inside = true;
      }
    }
    in_region(s) = inside ? 1.0 : 0.0;
    const double gap = std::abs(diff(s));
    if (inside)
      rep.sup_gap = std::max(rep.sup_gap, gap);
    else if (gap > 1e-9)
      ++rep.outside_violations;
  }
  const IntegralEstimate vol = meas.integrate(in_region);
  rep.region_measure = vol.value;
  rep.region_stderr = vol.stderr_;
  const IntegralEstimate l2 = meas.l2_norm(diff);
  rep.l2_error = l2.value;
  rep.l2_stderr = l2.stderr_;
  const double m = dict.m();
  const double r = std::sqrt(std::max(0.0, 1.0 - t * t));
  if (r > 0.0) {
    rep.sup_constant = rep.sup_gap * m / r;
    rep.measure_constant = rep.region_measure * m / std::pow(r, d);
  }
  return rep;
}

/// ||phi - g||_{L2(B^d)} by importance sampling on the error slab.
inline IntegralEstimate general_error(const GeneralApproximant& g, std::int64_t samples, std::uint64_t seed) {
  if (g.atom.offset >= 1.0) return {};
  return l2_error_on(AtomCombination::single(g.atom), g.g, Domain::ball(g.atom.dim()), {general_error_region(g)},
                     samples, seed);
}

}  // namespace wvar
